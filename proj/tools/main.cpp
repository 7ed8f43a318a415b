// tidygrid command-line driver: generation, pipeline stages, evaluation, and
// trace replay as separate subcommands sharing one workspace directory.
//
// Every subcommand takes --out (the workspace); all other paths are resolved
// relative to it. Each stage derives its randomness from the master --seed
// through the same named-stream mixing the library protocols use, so the
// staged flow  gen-tasks -> demo -> train-il -> self-train -> eval
// reproduces a single-call protocol run byte for byte.
//
// Exit codes: 0 success, 1 invalid input or flags, 2 runtime failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tidygrid/base.hpp"
#include "tidygrid/dataset.hpp"
#include "tidygrid/eval.hpp"
#include "tidygrid/io.hpp"
#include "tidygrid/pipeline.hpp"
#include "tidygrid/planner.hpp"
#include "tidygrid/policy.hpp"
#include "tidygrid/rollout.hpp"
#include "tidygrid/world.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tidygrid;

std::string resolve(const std::string& out_dir, const std::string& path) {
    const fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(out_dir) / p).string();
}

// Prerequisite check with a pointer at the subcommand that produces the file.
void require_input(const std::string& path, const std::string& what,
                   const std::string& producer) {
    if (!fs::exists(path)) {
        throw ValidationError("missing " + what + " '" + path + "'; run the `" + producer +
                              "` subcommand first");
    }
}

// Shared flags: workspace, master seed, rollout shape.
struct CommonOpts {
    std::string out = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    int horizon = 1000;
    int max_iterations = 200;
    int episodes_per_task = 5;
};

void add_out(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "Workspace directory (all paths resolve against it)")
        ->capture_default_str();
}

void add_seed(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

void add_rollout(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--jobs", o.jobs, "Concurrent episode rollouts")->capture_default_str();
    cmd->add_option("--horizon", o.horizon, "Low-level step budget per episode")
        ->capture_default_str();
    cmd->add_option("--max-iterations", o.max_iterations, "Plan-iteration cap per episode")
        ->capture_default_str();
    cmd->add_option("--episodes", o.episodes_per_task, "Episodes per task")
        ->capture_default_str();
}

EpisodeOptions episode_options(const CommonOpts& o) {
    EpisodeOptions opts;
    opts.horizon = o.horizon;
    opts.max_iterations = o.max_iterations;
    return opts;
}

struct FitOpts {
    double lr = 0.1;
    int epochs = 50;
    double l2 = 1e-4;
};

void add_fit(CLI::App* cmd, FitOpts& f) {
    cmd->add_option("--lr", f.lr, "Fit learning rate")->capture_default_str();
    cmd->add_option("--epochs", f.epochs, "Fit epochs")->capture_default_str();
    cmd->add_option("--l2", f.l2, "Fit ridge strength")->capture_default_str();
}

void write_stage_manifest(const std::string& out, const std::string& stage, std::uint64_t seed,
                          const json& config, const std::vector<std::string>& rel_files) {
    write_manifest(out, stage, seed, config.dump(), rel_files, "manifest_" + stage + ".json");
}

Scene load_scene_input(const std::string& out, const std::string& scene_path) {
    const std::string path = resolve(out, scene_path);
    require_input(path, "scene file", "gen-scenes");
    return load_scene(path);
}

PreferenceDataset load_prefs_input(const std::string& out, const std::string& prefs_path) {
    const std::string path = resolve(out, prefs_path);
    require_input(path, "preference file", "gen-prefs");
    return load_prefs(path);
}

std::vector<TaskSpec> load_tasks_input(const std::string& out, const std::string& tasks_path) {
    const std::string path = resolve(out, tasks_path);
    require_input(path, "task file", "gen-tasks");
    return load_tasks(path);
}

// --- subcommand bodies -------------------------------------------------------

int cmd_gen_scenes(const CommonOpts& o) {
    fs::create_directories(o.out);
    std::vector<std::string> files;
    for (const Scene& scene : builtin_scenes()) {
        const std::string rel = scene.scene_id + ".json";
        save_scene(scene, resolve(o.out, rel));
        files.push_back(rel);
    }
    write_stage_manifest(o.out, "gen-scenes", 0, json::object(), files);
    std::cout << "wrote " << files.size() << " scene files to " << o.out << "\n";
    return 0;
}

int cmd_gen_prefs(const CommonOpts& o, const std::vector<std::string>& scene_paths,
                  int min_pairs, int max_pairs) {
    std::vector<Scene> scenes;
    if (scene_paths.empty()) {
        scenes = builtin_scenes();
    } else {
        for (const auto& p : scene_paths) scenes.push_back(load_scene_input(o.out, p));
    }
    const PreferenceDataset prefs =
        generate_prefs(scenes, builtin_object_types(), o.seed, min_pairs, max_pairs);
    fs::create_directories(o.out);
    save_prefs(prefs, resolve(o.out, "prefs.json"));
    json config{{"min_pairs", min_pairs},
                {"max_pairs", max_pairs},
                {"scenes", scene_paths.empty() ? std::vector<std::string>{"<builtin>"}
                                               : scene_paths}};
    write_stage_manifest(o.out, "gen-prefs", o.seed, config, {"prefs.json"});
    std::cout << "wrote prefs.json (" << prefs.entries.size() << " object types)\n";
    return 0;
}

int cmd_gen_tasks(const CommonOpts& o, const std::string& scene_path,
                  const std::string& prefs_path, int demo_count, int train_count,
                  int test_count) {
    const Scene scene = load_scene_input(o.out, scene_path);
    const PreferenceDataset prefs = load_prefs_input(o.out, prefs_path);
    const auto demo = generate_task_set(scene, prefs, demo_count, o.seed, "task-demo");
    const auto train = generate_task_set(scene, prefs, train_count, o.seed, "task-train");
    const auto test = generate_task_set(scene, prefs, test_count, o.seed, "task-test");
    require_disjoint_tasks({&demo, &train, &test});
    save_tasks(demo, resolve(o.out, "tasks_demo.json"));
    save_tasks(train, resolve(o.out, "tasks_train.json"));
    save_tasks(test, resolve(o.out, "tasks_test.json"));
    json config{{"scene", scene_path},
                {"demo_count", demo_count},
                {"train_count", train_count},
                {"test_count", test_count}};
    write_stage_manifest(o.out, "gen-tasks", o.seed, config,
                         {"tasks_demo.json", "tasks_train.json", "tasks_test.json"});
    std::cout << "wrote " << demo.size() << " demo / " << train.size() << " train / "
              << test.size() << " test tasks\n";
    return 0;
}

int cmd_demo(const CommonOpts& o, const std::string& scene_path, const std::string& prefs_path,
             const std::string& tasks_path) {
    const Scene scene = load_scene_input(o.out, scene_path);
    const PreferenceDataset prefs = load_prefs_input(o.out, prefs_path);
    const auto tasks = load_tasks_input(o.out, tasks_path);
    const Dataset demo = collect_demos(scene, prefs, tasks, o.episodes_per_task,
                                       mix_seed(o.seed, "demos"), episode_options(o), o.jobs);
    export_finetune_jsonl(demo, resolve(o.out, "demo.jsonl"));
    json config{{"scene", scene_path},
                {"tasks", tasks_path},
                {"episodes_per_task", o.episodes_per_task},
                {"horizon", o.horizon}};
    write_stage_manifest(o.out, "demo", o.seed, config, {"demo.jsonl"});
    std::cout << "wrote demo.jsonl (" << demo.records.size() << " records over "
              << tasks.size() * static_cast<std::size_t>(o.episodes_per_task) << " episodes)\n";
    return 0;
}

int cmd_train_il(const CommonOpts& o, const std::string& scene_path,
                 const std::string& demo_path, const FitOpts& fit) {
    const Scene scene = load_scene_input(o.out, scene_path);
    const std::string demo_file = resolve(o.out, demo_path);
    require_input(demo_file, "demo dataset", "demo");
    const Dataset demo = import_finetune_jsonl(demo_file);
    const PolicyParams params = fit_il(demo, scene, PolicyParams{}, fit.lr, fit.epochs, fit.l2);
    save_params(params, resolve(o.out, "params_il.json"));
    json config{{"scene", scene_path},
                {"demo", demo_path},
                {"lr", fit.lr},
                {"epochs", fit.epochs},
                {"l2", fit.l2}};
    write_stage_manifest(o.out, "train-il", o.seed, config, {"params_il.json"});
    std::cout << "wrote params_il.json (fit over " << demo.records.size() << " records)\n";
    return 0;
}

int cmd_self_train(const CommonOpts& o, const std::string& scene_path,
                   const std::string& prefs_path, const std::string& tasks_path,
                   const std::string& params_path, int iterations, const FitOpts& fit,
                   bool mix_demos, const std::string& demo_path) {
    const Scene scene = load_scene_input(o.out, scene_path);
    const PreferenceDataset prefs = load_prefs_input(o.out, prefs_path);
    const auto tasks = load_tasks_input(o.out, tasks_path);
    const std::string params_file = resolve(o.out, params_path);
    require_input(params_file, "initial parameter file", "train-il");
    const PolicyParams params0 = load_params(params_file);

    Dataset demo;
    if (mix_demos) {
        const std::string demo_file = resolve(o.out, demo_path);
        require_input(demo_file, "demo dataset", "demo");
        demo = import_finetune_jsonl(demo_file);
    }

    PipelineConfig config;
    config.episode = episode_options(o);
    config.episodes_per_task = o.episodes_per_task;
    config.lr = fit.lr;
    config.epochs = fit.epochs;
    config.l2 = fit.l2;
    config.jobs = o.jobs;
    config.mix_demos = mix_demos;
    config.out_dir = resolve(o.out, "pipeline");
    const SelfTrainResult result =
        run_self_training(scene, prefs, params0, iterations, tasks, config,
                          mix_seed(o.seed, "self-train"), mix_demos ? &demo : nullptr);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    std::vector<std::string> files;
    for (int k = 1; k <= iterations; ++k) {
        const std::string tag = std::to_string(k);
        files.push_back("pipeline/grow_" + tag + ".jsonl");
        files.push_back("pipeline/self_train_" + tag + ".jsonl");
        files.push_back("pipeline/params_st" + tag + ".json");
    }
    json cfg{{"scene", scene_path},       {"tasks", tasks_path},
             {"params", params_path},     {"iterations", iterations},
             {"episodes_per_task", o.episodes_per_task}, {"mix_demos", mix_demos},
             {"lr", fit.lr},              {"epochs", fit.epochs},
             {"l2", fit.l2},              {"horizon", o.horizon}};
    write_stage_manifest(o.out, "self-train", o.seed, cfg, files);
    if (iterations == 0) {
        std::cout << "0 iterations requested: parameters unchanged from " << params_path << "\n";
    } else {
        std::cout << "wrote " << files.size() << " pipeline files (" << iterations
                  << " iterations)\n";
    }
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& scene_path, const std::string& prefs_path,
             std::vector<std::string> variants) {
    const Scene scene = load_scene_input(o.out, scene_path);
    const PreferenceDataset prefs = load_prefs_input(o.out, prefs_path);
    const auto train_tasks = load_tasks_input(o.out, "tasks_train.json");
    const auto test_tasks = load_tasks_input(o.out, "tasks_test.json");
    if (variants.empty()) variants = {"base", "il", "st1", "st2"};

    // Parameter files are only required by the variants that use them.
    PolicyParams il_params;
    std::vector<PolicyParams> st_params;
    for (const auto& variant : variants) {
        if (variant == "il") {
            const std::string path = resolve(o.out, "params_il.json");
            require_input(path, "imitation parameter file", "train-il");
            il_params = load_params(path);
        } else if (variant.rfind("st", 0) == 0) {
            int k = 0;
            try {
                k = std::stoi(variant.substr(2));
            } catch (const std::exception&) {
                throw ValidationError("unknown variant '" + variant + "'");
            }
            while (static_cast<int>(st_params.size()) < k) {
                const std::string tag = std::to_string(st_params.size() + 1);
                const std::string path = resolve(o.out, "pipeline/params_st" + tag + ".json");
                require_input(path, "self-training parameter file", "self-train");
                st_params.push_back(load_params(path));
            }
        }
    }

    std::vector<TracedEpisode> traced;
    for (const auto& variant : variants) {
        for (const std::string split : {"train", "test"}) {
            const auto& tasks = split == "train" ? train_tasks : test_tasks;
            const PlannerFactory factory =
                variant_factory(variant, scene, prefs, il_params, st_params);
            const auto episodes = run_episodes(scene, prefs, tasks, o.episodes_per_task, factory,
                                               episode_options(o),
                                               mix_seed(o.seed, "eval-" + variant + "-" + split),
                                               "eval", o.jobs);
            for (const auto& ep : episodes) {
                traced.push_back(TracedEpisode{scene.scene_id, variant, split, ep});
            }
        }
    }
    const AggregateReport report = report_from_episodes(traced);

    fs::create_directories(resolve(o.out, "traces"));
    std::vector<std::string> files;
    for (const auto& variant : variants) {
        for (const std::string split : {"train", "test"}) {
            std::vector<TracedEpisode> bucket;
            for (const auto& t : traced) {
                if (t.variant == variant && t.split == split) bucket.push_back(t);
            }
            const std::string rel = "traces/" + variant + "_" + split + ".jsonl";
            write_file(resolve(o.out, rel), trace_to_jsonl(bucket));
            files.push_back(rel);
        }
    }
    write_file(resolve(o.out, "report.csv"), report_to_csv(report));
    write_file(resolve(o.out, "report.json"), report_to_json_text(report));
    files.push_back("report.csv");
    files.push_back("report.json");
    json config{{"scene", scene_path},
                {"variants", variants},
                {"episodes_per_task", o.episodes_per_task},
                {"horizon", o.horizon}};
    write_manifest(o.out, "eval", o.seed, config.dump(), files);
    std::cout << report_to_csv(report);
    return 0;
}

int cmd_cross_eval(const CommonOpts& o, const std::string& source_path,
                   const std::string& target_path, const std::string& prefs_path,
                   const FitOpts& fit, ProtocolConfig config) {
    const Scene source = load_scene_input(o.out, source_path);
    const Scene target = load_scene_input(o.out, target_path);
    const PreferenceDataset prefs = load_prefs_input(o.out, prefs_path);
    config.episode = episode_options(o);
    config.episodes_per_task = o.episodes_per_task;
    config.lr = fit.lr;
    config.epochs = fit.epochs;
    config.l2 = fit.l2;
    config.st_l2 = fit.l2;
    config.jobs = o.jobs;
    config.out_dir = o.out;
    const ProtocolResult result = run_cross_domain(source, target, prefs, config, o.seed);
    for (const auto& w : result.self_train.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << report_to_csv(result.report);
    return 0;
}

int cmd_replay(const CommonOpts& o, const std::vector<std::string>& trace_paths) {
    std::vector<std::string> resolved;
    for (const auto& p : trace_paths) {
        const std::string path = resolve(o.out, p);
        require_input(path, "trace file", "eval");
        resolved.push_back(path);
    }
    const AggregateReport report = replay_traces(resolved);
    write_file(resolve(o.out, "replay_report.csv"), report_to_csv(report));
    std::cout << report_to_csv(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tidygrid: household-rearrangement laboratory"};
    app.require_subcommand(1);

    CommonOpts common;
    FitOpts fit;

    // gen-scenes
    auto* gen_scenes = app.add_subcommand("gen-scenes", "Write the four built-in scene files");
    add_out(gen_scenes, common);

    // gen-prefs
    auto* gen_prefs =
        app.add_subcommand("gen-prefs", "Synthesize a preference dataset (prefs.json)");
    add_out(gen_prefs, common);
    add_seed(gen_prefs, common);
    std::vector<std::string> pref_scene_paths;
    int min_pairs = 1;
    int max_pairs = 3;
    gen_prefs->add_option("--scene", pref_scene_paths,
                          "Scene files for the vocabulary (default: built-ins)");
    gen_prefs->add_option("--min-pairs", min_pairs, "Min correct pairs per object type")
        ->capture_default_str();
    gen_prefs->add_option("--max-pairs", max_pairs, "Max correct pairs per object type")
        ->capture_default_str();

    // gen-tasks
    auto* gen_tasks = app.add_subcommand(
        "gen-tasks", "Sample disjoint demo/train/test task files for a scene");
    add_out(gen_tasks, common);
    add_seed(gen_tasks, common);
    std::string scene_path = "scene1.json";
    std::string prefs_path = "prefs.json";
    int demo_count = 10;
    int train_count = 20;
    int test_count = 5;
    gen_tasks->add_option("--scene", scene_path, "Scene file")->capture_default_str();
    gen_tasks->add_option("--prefs", prefs_path, "Preference file")->capture_default_str();
    gen_tasks->add_option("--demo-count", demo_count, "Demo tasks")->capture_default_str();
    gen_tasks->add_option("--train-count", train_count, "Train tasks")->capture_default_str();
    gen_tasks->add_option("--test-count", test_count, "Test tasks")->capture_default_str();

    // demo
    auto* demo = app.add_subcommand("demo", "Collect demonstrator rollouts (demo.jsonl)");
    add_out(demo, common);
    add_seed(demo, common);
    add_rollout(demo, common);
    std::string demo_tasks_path = "tasks_demo.json";
    demo->add_option("--scene", scene_path, "Scene file")->capture_default_str();
    demo->add_option("--prefs", prefs_path, "Preference file")->capture_default_str();
    demo->add_option("--tasks", demo_tasks_path, "Task file")->capture_default_str();

    // train-il
    auto* train_il =
        app.add_subcommand("train-il", "Fit imitation parameters (params_il.json)");
    add_out(train_il, common);
    add_fit(train_il, fit);
    std::string demo_path = "demo.jsonl";
    train_il->add_option("--scene", scene_path, "Scene file")->capture_default_str();
    train_il->add_option("--demo", demo_path, "Demo dataset")->capture_default_str();

    // self-train
    auto* self_train = app.add_subcommand(
        "self-train", "Grow/filter/fit loop from existing parameters (pipeline/)");
    add_out(self_train, common);
    add_seed(self_train, common);
    add_rollout(self_train, common);
    add_fit(self_train, fit);
    std::string train_tasks_path = "tasks_train.json";
    std::string params_path = "params_il.json";
    int st_iterations = 2;
    bool mix_demos = false;
    self_train->add_option("--scene", scene_path, "Scene file")->capture_default_str();
    self_train->add_option("--prefs", prefs_path, "Preference file")->capture_default_str();
    self_train->add_option("--tasks", train_tasks_path, "Train task file")
        ->capture_default_str();
    self_train->add_option("--params", params_path, "Starting parameter file")
        ->capture_default_str();
    self_train->add_option("--iterations", st_iterations, "Self-training iterations")
        ->capture_default_str();
    self_train->add_flag("--mix-demos", mix_demos, "Mix demo decisions into each fit");
    self_train->add_option("--demo", demo_path, "Demo dataset (with --mix-demos)")
        ->capture_default_str();

    // eval
    auto* eval_cmd = app.add_subcommand(
        "eval", "Evaluate variants on the train/test tasks (report.csv, traces/)");
    add_out(eval_cmd, common);
    add_seed(eval_cmd, common);
    add_rollout(eval_cmd, common);
    std::vector<std::string> variants;
    eval_cmd->add_option("--scene", scene_path, "Scene file")->capture_default_str();
    eval_cmd->add_option("--prefs", prefs_path, "Preference file")->capture_default_str();
    eval_cmd->add_option("--variant", variants,
                         "Variants to evaluate (default: base il st1 st2)");

    // cross-eval
    auto* cross = app.add_subcommand(
        "cross-eval", "Full pipeline on a source scene, evaluation on a target scene");
    add_out(cross, common);
    add_seed(cross, common);
    add_rollout(cross, common);
    add_fit(cross, fit);
    std::string source_path = "scene2.json";
    std::string target_path = "scene1.json";
    ProtocolConfig cross_config;
    cross->add_option("--source", source_path, "Training scene file")->capture_default_str();
    cross->add_option("--target", target_path, "Evaluation scene file")->capture_default_str();
    cross->add_option("--prefs", prefs_path, "Preference file")->capture_default_str();
    cross->add_option("--demo-count", cross_config.demo_task_count, "Demo tasks")
        ->capture_default_str();
    cross->add_option("--train-count", cross_config.train_task_count, "Train tasks")
        ->capture_default_str();
    cross->add_option("--test-count", cross_config.test_task_count, "Test tasks")
        ->capture_default_str();
    cross->add_option("--iterations", cross_config.st_iterations, "Self-training iterations")
        ->capture_default_str();
    cross->add_option("--st-lr", cross_config.st_lr, "Self-training learning rate")
        ->capture_default_str();
    cross->add_option("--st-epochs", cross_config.st_epochs, "Self-training epochs")
        ->capture_default_str();
    cross->add_option("--grow-episodes", cross_config.grow_episodes_per_task,
                      "Episodes per task when growing self-training data")
        ->capture_default_str();
    cross->add_flag("--mix-demos,!--no-mix-demos", cross_config.mix_demos,
                    "Mix demo decisions into each self-training fit (default: on)");
    cross->add_option("--variant", cross_config.variants, "Variants (default: base il st1 st2)");

    // replay
    auto* replay = app.add_subcommand(
        "replay", "Recompute a report from trace files without simulating");
    add_out(replay, common);
    std::vector<std::string> trace_paths;
    replay->add_option("traces", trace_paths, "Trace JSONL files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_scenes->parsed()) return cmd_gen_scenes(common);
        if (gen_prefs->parsed()) return cmd_gen_prefs(common, pref_scene_paths, min_pairs,
                                                      max_pairs);
        if (gen_tasks->parsed())
            return cmd_gen_tasks(common, scene_path, prefs_path, demo_count, train_count,
                                 test_count);
        if (demo->parsed()) return cmd_demo(common, scene_path, prefs_path, demo_tasks_path);
        if (train_il->parsed()) return cmd_train_il(common, scene_path, demo_path, fit);
        if (self_train->parsed())
            return cmd_self_train(common, scene_path, prefs_path, train_tasks_path, params_path,
                                  st_iterations, fit, mix_demos, demo_path);
        if (eval_cmd->parsed()) return cmd_eval(common, scene_path, prefs_path, variants);
        if (cross->parsed())
            return cmd_cross_eval(common, source_path, target_path, prefs_path, fit,
                                  cross_config);
        if (replay->parsed()) return cmd_replay(common, trace_paths);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
