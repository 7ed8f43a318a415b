// Training pipeline: demonstration collection, imitation fitting, and the
// grow -> annotate -> filter -> fit self-training loop.

#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "tidygrid/dataset.hpp"
#include "tidygrid/pipeline.hpp"
#include "tidygrid/planner.hpp"
#include "tidygrid/policy.hpp"
#include "tidygrid/rollout.hpp"
#include "tidygrid/world.hpp"

using namespace tidygrid;

namespace {

struct Fixture {
    Scene scene = builtin_scenes()[2];  // corridor, bathroom, bedroom
    PreferenceDataset prefs = generate_prefs(builtin_scenes(), builtin_object_types(), 5);
    std::vector<TaskSpec> tasks;
    EpisodeOptions options;

    Fixture() {
        tasks.push_back(generate_task(scene, prefs, 60));
        tasks.push_back(generate_task(scene, prefs, 61));
        options.horizon = 400;
        options.max_iterations = 40;
    }
};

int count_positive(const Dataset& ds) {
    int n = 0;
    for (const auto& rec : ds.records) {
        if (rec.reward > 0) ++n;
    }
    return n;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("collect_demos gathers annotated records deterministically") {
    Fixture f;
    const Dataset demo = collect_demos(f.scene, f.prefs, f.tasks, 2, 17, f.options);

    CHECK(demo.kind == Dataset::Kind::demo);
    CHECK(demo.scene_id == f.scene.scene_id);
    CHECK(demo.seed == 17);
    CHECK(demo.iteration == 0);
    REQUIRE(!demo.records.empty());

    for (const auto& rec : demo.records) {
        CAPTURE(rec.task_id);
        CHECK((rec.task_id == f.tasks[0].task_id || rec.task_id == f.tasks[1].task_id));
        CHECK(rec.episode >= 0);
        CHECK(rec.episode < 2);
        CHECK(!rec.prompt.empty());
        CHECK(!rec.response.empty());
        CHECK(rec.generated >= rec.executed);
        // Rewards are filled from outcomes at collection time, so annotating
        // again changes nothing.
        CHECK(rec.reward == outcome_reward(rec.outcomes, f.scene, f.prefs));
    }
    CHECK(dataset_to_jsonl(annotate(demo, f.scene, f.prefs)) == dataset_to_jsonl(demo));

    SUBCASE("byte-identical across repeat runs and worker counts") {
        const Dataset again = collect_demos(f.scene, f.prefs, f.tasks, 2, 17, f.options);
        CHECK(again == demo);
        const Dataset parallel =
            collect_demos(f.scene, f.prefs, f.tasks, 2, 17, f.options, /*jobs=*/3);
        CHECK(parallel == demo);
        const Dataset other = collect_demos(f.scene, f.prefs, f.tasks, 2, 18, f.options);
        CHECK(other != demo);
    }
}

TEST_CASE("fit_il improves demo likelihood over the zero initializer") {
    Fixture f;
    const Dataset demo = collect_demos(f.scene, f.prefs, f.tasks, 1, 17, f.options);
    REQUIRE(!demo.records.empty());

    const PolicyParams init;  // zero weights, temperature 1
    const PolicyParams fitted = fit_il(demo, f.scene, init, 0.1, 30, 1e-4);

    const DecisionDataset pairs = decision_pairs(demo, f.scene);
    const double nll_init = policy_nll(pairs, init);
    const double nll_fit = policy_nll(pairs, fitted);
    CHECK(nll_fit < nll_init);
    CHECK(fitted.temperature == init.temperature);  // temperature is not fitted

    SUBCASE("deterministic") {
        const PolicyParams again = fit_il(demo, f.scene, init, 0.1, 30, 1e-4);
        CHECK(params_to_json_text(again) == params_to_json_text(fitted));
    }
    SUBCASE("empty demo set is an error") {
        Dataset empty;
        empty.kind = Dataset::Kind::demo;
        CHECK_THROWS_AS(fit_il(empty, f.scene, init), ValidationError);
    }
}

TEST_CASE("annotate recomputes rewards from outcome strings") {
    const Scene scene = builtin_scenes()[0];
    PreferenceDataset prefs;
    prefs.entries["pan"] = {{"kitchen", "counter"}};

    Dataset ds;
    ds.kind = Dataset::Kind::grow;
    ds.records.resize(3);
    ds.records[0].outcomes = {
        format_outcome({"pan 0", "kitchen 0 table 3", "kitchen 0 counter 0"})};
    ds.records[0].reward = -7;  // stale, must be overwritten
    ds.records[1].outcomes = {
        format_outcome({"pan 0", "kitchen 0 counter 0", "kitchen 0 sink 1"})};
    ds.records[1].reward = 5;
    ds.records[2].outcomes = {};  // nothing moved
    ds.records[2].reward = 9;

    const Dataset out = annotate(ds, scene, prefs);
    REQUIRE(out.records.size() == 3);
    CHECK(out.records[0].reward == 1);
    CHECK(out.records[1].reward == -1);
    CHECK(out.records[2].reward == 0);
    // Everything else is untouched.
    CHECK(out.kind == ds.kind);
    CHECK(out.records[0].outcomes == ds.records[0].outcomes);
}

TEST_CASE("filter_positive keeps reward > 0 in order") {
    Dataset ds;
    ds.kind = Dataset::Kind::grow;
    ds.scene_id = "scene9";
    ds.seed = 4;
    ds.iteration = 2;
    ds.records.resize(4);
    ds.records[0].reward = 1;
    ds.records[0].task_id = "first";
    ds.records[1].reward = 0;
    ds.records[2].reward = -1;
    ds.records[3].reward = 1;
    ds.records[3].task_id = "last";

    const Dataset kept = filter_positive(ds);
    CHECK(kept.kind == Dataset::Kind::self_train);
    CHECK(kept.scene_id == "scene9");
    CHECK(kept.seed == 4);
    CHECK(kept.iteration == 2);
    REQUIRE(kept.records.size() == 2);
    CHECK(kept.records[0].task_id == "first");
    CHECK(kept.records[1].task_id == "last");

    CHECK(filter_positive(Dataset{}).records.empty());
}

TEST_CASE("self-training loop: structure, annotation, and persistence") {
    Fixture f;
    const Dataset demo = collect_demos(f.scene, f.prefs, f.tasks, 1, 17, f.options);
    // Start from the imitation fit so grow rollouts reliably earn rewards.
    const PolicyParams il = fit_il(demo, f.scene, PolicyParams{}, 0.1, 30, 1e-4);

    PipelineConfig config;
    config.episode = f.options;
    config.episodes_per_task = 1;
    config.lr = 0.05;
    config.epochs = 10;
    const auto out_dir = std::filesystem::temp_directory_path() / "tidygrid_pipeline_test";
    std::filesystem::remove_all(out_dir);
    config.out_dir = out_dir.string();

    const SelfTrainResult result =
        run_self_training(f.scene, f.prefs, il, 2, f.tasks, config, 23, &demo);

    REQUIRE(result.params.size() == 2);
    REQUIRE(result.grow_datasets.size() == 2);
    REQUIRE(result.self_train_sets.size() == 2);
    REQUIRE(result.loss_traces.size() == 2);

    for (int k = 0; k < 2; ++k) {
        CAPTURE(k);
        const Dataset& grown = result.grow_datasets[static_cast<std::size_t>(k)];
        const Dataset& positives = result.self_train_sets[static_cast<std::size_t>(k)];

        CHECK(grown.kind == Dataset::Kind::grow);
        CHECK(grown.iteration == k + 1);
        CHECK(grown.scene_id == f.scene.scene_id);
        CHECK(grown.seed == mix_seed(23, "grow", static_cast<std::uint64_t>(k + 1)));
        for (const auto& rec : grown.records) {
            CHECK(rec.reward == outcome_reward(rec.outcomes, f.scene, f.prefs));
        }

        CHECK(positives.kind == Dataset::Kind::self_train);
        CHECK(positives.iteration == k + 1);
        CHECK(static_cast<int>(positives.records.size()) == count_positive(grown));
        for (const auto& rec : positives.records) CHECK(rec.reward > 0);

        // A non-empty filtered set means a fit ran (one loss per epoch); an
        // empty one means the parameters were carried over.
        const auto& trace = result.loss_traces[static_cast<std::size_t>(k)];
        if (positives.records.empty()) {
            CHECK(trace.empty());
        } else {
            CHECK(static_cast<int>(trace.size()) == config.epochs);
        }
    }
    // The imitation-trained policy keeps earning positive rewards on its own
    // rollouts; the loop is fitting, not idling.
    CHECK(!result.self_train_sets[0].records.empty());
    CHECK(result.warnings.empty());
    CHECK(params_to_json_text(result.params[0]) != params_to_json_text(il));

    SUBCASE("intermediate artifacts land in out_dir") {
        for (const std::string tag : {"1", "2"}) {
            CAPTURE(tag);
            CHECK(std::filesystem::exists(out_dir / ("grow_" + tag + ".jsonl")));
            CHECK(std::filesystem::exists(out_dir / ("self_train_" + tag + ".jsonl")));
            CHECK(std::filesystem::exists(out_dir / ("params_st" + tag + ".json")));
        }
        CHECK(import_finetune_jsonl((out_dir / "grow_1.jsonl").string()) ==
              result.grow_datasets[0]);
        CHECK(import_finetune_jsonl((out_dir / "self_train_2.jsonl").string()) ==
              result.self_train_sets[1]);
        CHECK(params_to_json_text(load_params((out_dir / "params_st1.json").string())) ==
              params_to_json_text(result.params[0]));
        CHECK(params_to_json_text(load_params((out_dir / "params_st2.json").string())) ==
              params_to_json_text(result.params[1]));
    }

    SUBCASE("deterministic rerun") {
        PipelineConfig quiet = config;
        quiet.out_dir.clear();
        const SelfTrainResult again =
            run_self_training(f.scene, f.prefs, il, 2, f.tasks, quiet, 23, &demo);
        REQUIRE(again.params.size() == 2);
        CHECK(again.grow_datasets[0] == result.grow_datasets[0]);
        CHECK(again.grow_datasets[1] == result.grow_datasets[1]);
        CHECK(params_to_json_text(again.params[1]) == params_to_json_text(result.params[1]));
    }

    SUBCASE("mix_demos folds demonstration pairs into each fit") {
        PipelineConfig mixed = config;
        mixed.out_dir.clear();
        mixed.mix_demos = true;
        const SelfTrainResult with_demos =
            run_self_training(f.scene, f.prefs, il, 1, f.tasks, mixed, 23, &demo);
        PipelineConfig plain = mixed;
        plain.mix_demos = false;
        const SelfTrainResult without =
            run_self_training(f.scene, f.prefs, il, 1, f.tasks, plain, 23, &demo);
        // Same grow data, different fit data, different parameters.
        CHECK(with_demos.grow_datasets[0] == without.grow_datasets[0]);
        CHECK(params_to_json_text(with_demos.params[0]) !=
              params_to_json_text(without.params[0]));
        // mix_demos without a demo pointer degrades to the plain fit.
        const SelfTrainResult no_ptr =
            run_self_training(f.scene, f.prefs, il, 1, f.tasks, mixed, 23, nullptr);
        CHECK(params_to_json_text(no_ptr.params[0]) == params_to_json_text(without.params[0]));
    }

    std::filesystem::remove_all(out_dir);
}

TEST_CASE("self-training edge cases") {
    Fixture f;
    const PolicyParams params0 = make_baseline_params(f.scene, f.prefs, 9);
    PipelineConfig config;
    config.episode = f.options;
    config.episodes_per_task = 1;

    SUBCASE("zero iterations do nothing") {
        const SelfTrainResult r =
            run_self_training(f.scene, f.prefs, params0, 0, f.tasks, config, 23);
        CHECK(r.params.empty());
        CHECK(r.grow_datasets.empty());
        CHECK(r.self_train_sets.empty());
        CHECK(r.loss_traces.empty());
        CHECK(r.warnings.empty());
    }
    SUBCASE("negative iterations are an error") {
        CHECK_THROWS_AS(run_self_training(f.scene, f.prefs, params0, -1, f.tasks, config, 23),
                        ValidationError);
    }
    SUBCASE("no positive records: warn and carry parameters") {
        // With no training tasks at all, grow is empty and so is the filter.
        const std::vector<TaskSpec> no_tasks;
        const SelfTrainResult r =
            run_self_training(f.scene, f.prefs, params0, 2, no_tasks, config, 23);
        REQUIRE(r.params.size() == 2);
        REQUIRE(r.warnings.size() == 2);
        CHECK(r.warnings[0].find("iteration 1") != std::string::npos);
        CHECK(r.warnings[1].find("iteration 2") != std::string::npos);
        CHECK(params_to_json_text(r.params[0]) == params_to_json_text(params0));
        CHECK(params_to_json_text(r.params[1]) == params_to_json_text(params0));
        CHECK(r.loss_traces[0].empty());
        CHECK(r.grow_datasets[0].records.empty());
        CHECK(r.self_train_sets[0].records.empty());
    }
}

}  // TEST_SUITE
