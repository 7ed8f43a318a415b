#include "tidygrid/pipeline.hpp"

#include <filesystem>

#include "tidygrid/planner.hpp"

namespace tidygrid {

namespace {

Dataset assemble(Dataset::Kind kind, const Scene& scene, std::uint64_t seed,
                 const std::vector<EpisodeResult>& episodes) {
    Dataset dataset;
    dataset.kind = kind;
    dataset.scene_id = scene.scene_id;
    dataset.seed = seed;
    for (const auto& ep : episodes) {
        dataset.records.insert(dataset.records.end(), ep.records.begin(), ep.records.end());
    }
    return dataset;
}

}  // namespace

Dataset collect_demos(const Scene& scene, const PreferenceDataset& prefs,
                      const std::vector<TaskSpec>& tasks, int episodes_per_task,
                      std::uint64_t seed, const EpisodeOptions& options, int jobs) {
    PlannerFactory factory = [&prefs](const TaskSpec&, int, std::uint64_t) {
        return std::make_unique<DemonstratorPlanner>(&prefs);
    };
    const std::vector<EpisodeResult> episodes =
        run_episodes(scene, prefs, tasks, episodes_per_task, factory, options, seed, "demo", jobs);
    return assemble(Dataset::Kind::demo, scene, seed, episodes);
}

PolicyParams fit_il(const Dataset& demo, const Scene& scene, const PolicyParams& init, double lr,
                    int epochs, double l2) {
    if (demo.records.empty()) throw ValidationError("cannot fit on an empty demo dataset");
    return policy_fit(decision_pairs(demo, scene), init, lr, epochs, l2).params;
}

Dataset grow(const Scene& scene, const PreferenceDataset& prefs, const PolicyParams& params,
             const std::vector<TaskSpec>& train_tasks, int episodes_per_task, std::uint64_t seed,
             const EpisodeOptions& options, int jobs) {
    PlannerFactory factory = [&params](const TaskSpec&, int, std::uint64_t) {
        return std::make_unique<PolicyPlanner>(params);
    };
    const std::vector<EpisodeResult> episodes = run_episodes(
        scene, prefs, train_tasks, episodes_per_task, factory, options, seed, "grow", jobs);
    return assemble(Dataset::Kind::grow, scene, seed, episodes);
}

Dataset annotate(const Dataset& dataset, const Scene& scene, const PreferenceDataset& prefs) {
    Dataset out = dataset;
    for (auto& rec : out.records) rec.reward = outcome_reward(rec.outcomes, scene, prefs);
    return out;
}

Dataset filter_positive(const Dataset& dataset) {
    Dataset out;
    out.kind = Dataset::Kind::self_train;
    out.scene_id = dataset.scene_id;
    out.seed = dataset.seed;
    out.iteration = dataset.iteration;
    for (const auto& rec : dataset.records) {
        if (rec.reward > 0) out.records.push_back(rec);
    }
    return out;
}

SelfTrainResult run_self_training(const Scene& scene, const PreferenceDataset& prefs,
                                  const PolicyParams& params0, int iterations,
                                  const std::vector<TaskSpec>& train_tasks,
                                  const PipelineConfig& config, std::uint64_t seed,
                                  const Dataset* demos) {
    if (iterations < 0) throw ValidationError("iterations must be non-negative");
    SelfTrainResult result;
    PolicyParams current = params0;
    const bool persist = !config.out_dir.empty();
    if (persist) std::filesystem::create_directories(config.out_dir);

    for (int k = 1; k <= iterations; ++k) {
        const std::uint64_t grow_seed = mix_seed(seed, "grow", static_cast<std::uint64_t>(k));
        Dataset grown = grow(scene, prefs, current, train_tasks, config.episodes_per_task,
                             grow_seed, config.episode, config.jobs);
        grown.iteration = k;
        Dataset annotated = annotate(grown, scene, prefs);
        Dataset positives = filter_positive(annotated);

        if (positives.records.empty()) {
            result.warnings.push_back("self-training iteration " + std::to_string(k) +
                                      ": no positive-reward records; parameters carried over");
            result.loss_traces.emplace_back();
        } else {
            DecisionDataset pairs = decision_pairs(positives, scene);
            if (config.mix_demos && demos != nullptr) {
                DecisionDataset demo_pairs = decision_pairs(*demos, scene);
                pairs.insert(pairs.end(), std::make_move_iterator(demo_pairs.begin()),
                             std::make_move_iterator(demo_pairs.end()));
            }
            FitResult fit = policy_fit(pairs, current, config.lr, config.epochs, config.l2);
            current = fit.params;
            result.loss_traces.push_back(std::move(fit.loss_trace));
        }

        if (persist) {
            const std::string tag = std::to_string(k);
            export_finetune_jsonl(annotated, config.out_dir + "/grow_" + tag + ".jsonl");
            export_finetune_jsonl(positives, config.out_dir + "/self_train_" + tag + ".jsonl");
            save_params(current, config.out_dir + "/params_st" + tag + ".json");
        }
        result.params.push_back(current);
        result.grow_datasets.push_back(std::move(annotated));
        result.self_train_sets.push_back(std::move(positives));
    }
    return result;
}

}  // namespace tidygrid
