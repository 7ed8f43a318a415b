#include "tidygrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tidygrid/io.hpp"
#include "tidygrid/planner.hpp"

namespace tidygrid {

using nlohmann::json;

double success_rate(const WorldState& start, const WorldState& end, const Scene& scene,
                    const PreferenceDataset& prefs) {
    const CorrectCount s = count_correct(start, scene, prefs);
    const CorrectCount e = count_correct(end, scene, prefs);
    if (s.misplaced == 0) {
        throw ValidationError("success rate undefined: no misplaced objects at the start");
    }
    return static_cast<double>(e.correct - s.correct) / s.misplaced;
}

Aggregate aggregate(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw ValidationError("aggregate requires at least two values (SEM undefined)");
    }
    Aggregate a;
    a.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / a.n;
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.sem = std::sqrt(sq / (a.n - 1)) / std::sqrt(static_cast<double>(a.n));
    return a;
}

double sign_test_p(int successes, int trials) {
    if (trials < 0 || successes < 0 || successes > trials) {
        throw ValidationError("sign test: need 0 <= successes <= trials");
    }
    double p = 0.0;
    for (int k = successes; k <= trials; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * (trials - i) / (i + 1);
        p += c;
    }
    return p / std::pow(2.0, trials);
}

// --- reports -----------------------------------------------------------------

namespace {

std::string num(double v) {
    return json(v).dump();  // shortest round-trip text, locale-independent
}

json aggregate_to_json(const Aggregate& a) {
    json j;
    j["mean"] = a.mean;
    j["sem"] = a.sem;
    j["n"] = a.n;
    return j;
}

Aggregate aggregate_from_json(const json& j) {
    Aggregate a;
    a.mean = j.at("mean").get<double>();
    a.sem = j.at("sem").get<double>();
    a.n = j.at("n").get<int>();
    return a;
}

void sort_rows(std::vector<ReportRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(a.scene, a.variant, a.split) < std::tie(b.scene, b.variant, b.split);
    });
}

}  // namespace

std::string report_to_csv(const AggregateReport& report) {
    std::ostringstream out;
    out << "scene,variant,split,mean,sem,n\n";
    for (const auto& row : report.rows) {
        out << row.scene << ',' << row.variant << ',' << row.split << ',' << num(row.success.mean)
            << ',' << num(row.success.sem) << ',' << row.success.n << "\n";
    }
    return out.str();
}

std::string report_to_json_text(const AggregateReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json r;
        r["scene"] = row.scene;
        r["variant"] = row.variant;
        r["split"] = row.split;
        r["success"] = aggregate_to_json(row.success);
        r["executability"] = aggregate_to_json(row.executability);
        r["unique_placements"] = aggregate_to_json(row.unique_placements);
        rows.push_back(std::move(r));
    }
    json j;
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

AggregateReport report_from_json_text(const std::string& text) {
    json j = parse_json_text(text, "report file");
    AggregateReport report;
    for (const auto& r : j.at("rows")) {
        ReportRow row;
        row.scene = r.at("scene").get<std::string>();
        row.variant = r.at("variant").get<std::string>();
        row.split = r.at("split").get<std::string>();
        row.success = aggregate_from_json(r.at("success"));
        row.executability = aggregate_from_json(r.at("executability"));
        row.unique_placements = aggregate_from_json(r.at("unique_placements"));
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- episode traces ----------------------------------------------------------

namespace {

json placements_to_json(const std::map<std::string, std::vector<std::string>>& placements) {
    json j = json::object();
    for (const auto& [rec, objs] : placements) j[rec] = objs;
    return j;
}

std::map<std::string, std::vector<std::string>> placements_from_json(const json& j) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [rec, objs] : j.items()) out[rec] = objs.get<std::vector<std::string>>();
    return out;
}

json episode_to_json(const TracedEpisode& t) {
    const EpisodeResult& ep = t.episode;
    json j;
    j["scene"] = t.scene;
    j["variant"] = t.variant;
    j["split"] = t.split;
    j["task_id"] = ep.task_id;
    j["seed"] = ep.seed;
    j["episode"] = ep.episode_index;
    j["correct_start"] = ep.correct_start;
    j["misplaced_start"] = ep.misplaced_start;
    j["correct_end"] = ep.correct_end;
    j["misplaced_end"] = ep.misplaced_end;
    j["final_t"] = ep.final_t;
    j["start_placements"] = placements_to_json(ep.start_placements);
    j["end_placements"] = placements_to_json(ep.end_placements);
    json iters = json::array();
    for (const auto& it : ep.iterations) {
        json ji;
        ji["iteration"] = it.iteration;
        ji["response"] = it.response;
        ji["generated"] = it.generated;
        ji["executed"] = it.executed;
        ji["outcomes"] = it.outcomes;
        json places = json::array();
        for (const auto& [obj, rec] : it.places) places.push_back(json::array({obj, rec}));
        ji["places"] = std::move(places);
        ji["reward"] = it.reward;
        ji["reward_sum"] = it.reward_sum;
        ji["t_after"] = it.t_after;
        if (!it.error.empty()) ji["error"] = it.error;
        iters.push_back(std::move(ji));
    }
    j["iterations"] = std::move(iters);
    return j;
}

TracedEpisode episode_from_json(const json& j) {
    TracedEpisode t;
    t.scene = j.at("scene").get<std::string>();
    t.variant = j.at("variant").get<std::string>();
    t.split = j.at("split").get<std::string>();
    EpisodeResult& ep = t.episode;
    ep.task_id = j.at("task_id").get<std::string>();
    ep.seed = j.at("seed").get<std::uint64_t>();
    ep.episode_index = j.at("episode").get<int>();
    ep.correct_start = j.at("correct_start").get<int>();
    ep.misplaced_start = j.at("misplaced_start").get<int>();
    ep.correct_end = j.at("correct_end").get<int>();
    ep.misplaced_end = j.at("misplaced_end").get<int>();
    ep.final_t = j.at("final_t").get<int>();
    ep.start_placements = placements_from_json(j.at("start_placements"));
    ep.end_placements = placements_from_json(j.at("end_placements"));
    for (const auto& ji : j.at("iterations")) {
        IterationTrace it;
        it.iteration = ji.at("iteration").get<int>();
        it.response = ji.at("response").get<std::string>();
        it.generated = ji.at("generated").get<int>();
        it.executed = ji.at("executed").get<int>();
        it.outcomes = ji.at("outcomes").get<std::vector<std::string>>();
        for (const auto& p : ji.at("places")) {
            it.places.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        }
        it.reward = ji.at("reward").get<int>();
        it.reward_sum = ji.at("reward_sum").get<int>();
        it.t_after = ji.at("t_after").get<int>();
        if (ji.contains("error")) it.error = ji.at("error").get<std::string>();
        ep.iterations.push_back(std::move(it));
    }
    ep.metrics = compute_metrics(ep);
    return t;
}

}  // namespace

std::string trace_to_jsonl(const std::vector<TracedEpisode>& episodes) {
    std::ostringstream out;
    for (const auto& ep : episodes) out << episode_to_json(ep).dump() << "\n";
    return out.str();
}

std::vector<TracedEpisode> trace_from_jsonl(const std::string& text) {
    std::vector<TracedEpisode> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        out.push_back(episode_from_json(
            parse_json_text(line, "trace line " + std::to_string(line_no))));
    }
    return out;
}

AggregateReport report_from_episodes(const std::vector<TracedEpisode>& episodes) {
    struct Values {
        std::vector<double> success;
        std::vector<double> executability;
        std::vector<double> unique;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Values> groups;
    for (const auto& t : episodes) {
        const EpisodeMetrics m = compute_metrics(t.episode);
        Values& v = groups[{t.scene, t.variant, t.split}];
        v.success.push_back(m.success_rate);
        v.executability.push_back(m.executability);
        v.unique.push_back(static_cast<double>(m.unique_placements));
    }
    AggregateReport report;
    for (const auto& [key, values] : groups) {
        ReportRow row;
        row.scene = std::get<0>(key);
        row.variant = std::get<1>(key);
        row.split = std::get<2>(key);
        row.success = aggregate(values.success);
        row.executability = aggregate(values.executability);
        row.unique_placements = aggregate(values.unique);
        report.rows.push_back(std::move(row));
    }
    sort_rows(report.rows);
    return report;
}

AggregateReport replay_traces(const std::vector<std::string>& trace_paths) {
    std::vector<TracedEpisode> episodes;
    for (const auto& path : trace_paths) {
        std::vector<TracedEpisode> part = trace_from_jsonl(read_file(path));
        episodes.insert(episodes.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
    }
    return report_from_episodes(episodes);
}

// --- protocols ---------------------------------------------------------------

std::vector<TaskSpec> generate_task_set(const Scene& scene, const PreferenceDataset& prefs,
                                        int count, std::uint64_t seed, const std::string& label) {
    std::vector<TaskSpec> tasks;
    tasks.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        tasks.push_back(
            generate_task(scene, prefs, mix_seed(seed, label, static_cast<std::uint64_t>(i))));
    }
    return tasks;
}

void require_disjoint_tasks(const std::vector<const std::vector<TaskSpec>*>& sets) {
    std::set<std::string> ids;
    std::size_t total = 0;
    for (const auto* set : sets) {
        for (const auto& task : *set) {
            ids.insert(task.task_id);
            ++total;
        }
    }
    if (ids.size() != total) {
        throw ValidationError("task sets are not disjoint (task id collision across splits)");
    }
}

PlannerFactory variant_factory(const std::string& variant, const Scene& scene,
                               const PreferenceDataset& prefs, const PolicyParams& il,
                               const std::vector<PolicyParams>& st) {
    if (variant == "base") {
        return [&scene, &prefs](const TaskSpec&, int, std::uint64_t episode_seed) {
            return std::make_unique<BaselinePlanner>(scene, prefs, episode_seed);
        };
    }
    if (variant == "demonstrator") {
        return [&prefs](const TaskSpec&, int, std::uint64_t) {
            return std::make_unique<DemonstratorPlanner>(&prefs);
        };
    }
    if (variant == "il") {
        return [params = il](const TaskSpec&, int, std::uint64_t) {
            return std::make_unique<PolicyPlanner>(params);
        };
    }
    if (variant.rfind("st", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(variant.substr(2));
        } catch (const std::exception&) {
            throw ValidationError("unknown variant '" + variant + "'");
        }
        if (k < 1 || k > static_cast<int>(st.size())) {
            throw ValidationError("variant '" + variant + "' needs " + std::to_string(k) +
                                  " self-training iterations (have " +
                                  std::to_string(st.size()) + ")");
        }
        return [params = st[static_cast<std::size_t>(k - 1)]](const TaskSpec&, int,
                                                              std::uint64_t) {
            return std::make_unique<PolicyPlanner>(params);
        };
    }
    throw ValidationError("unknown variant '" + variant + "'");
}

namespace {

std::string config_to_json_text(const ProtocolConfig& config) {
    json j;
    j["demo_task_count"] = config.demo_task_count;
    j["train_task_count"] = config.train_task_count;
    j["test_task_count"] = config.test_task_count;
    j["episodes_per_task"] = config.episodes_per_task;
    j["grow_episodes_per_task"] = config.grow_episodes_per_task;
    j["st_iterations"] = config.st_iterations;
    j["horizon"] = config.episode.horizon;
    j["max_iterations"] = config.episode.max_iterations;
    j["samples_per_prompt"] = config.episode.samples_per_prompt;
    j["lr"] = config.lr;
    j["epochs"] = config.epochs;
    j["l2"] = config.l2;
    j["st_lr"] = config.st_lr;
    j["st_epochs"] = config.st_epochs;
    j["st_l2"] = config.st_l2;
    j["mix_demos"] = config.mix_demos;
    j["variants"] = config.variants;
    return j.dump();
}

ProtocolResult run_pipeline_and_eval(const Scene& train_scene, const Scene& test_scene,
                                     const std::string& scene_label,
                                     const PreferenceDataset& prefs, const ProtocolConfig& config,
                                     std::uint64_t seed, const std::string& manifest_kind) {
    ProtocolResult result;
    result.demo_tasks = generate_task_set(train_scene, prefs, config.demo_task_count, seed, "task-demo");
    result.train_tasks =
        generate_task_set(train_scene, prefs, config.train_task_count, seed, "task-train");
    result.test_tasks = generate_task_set(test_scene, prefs, config.test_task_count, seed, "task-test");
    require_disjoint_tasks({&result.demo_tasks, &result.train_tasks, &result.test_tasks});

    result.demo_dataset =
        collect_demos(train_scene, prefs, result.demo_tasks, config.episodes_per_task,
                      mix_seed(seed, "demos"), config.episode, config.jobs);
    result.il_params = fit_il(result.demo_dataset, train_scene, PolicyParams{}, config.lr,
                              config.epochs, config.l2);

    PipelineConfig pipeline_config;
    pipeline_config.episode = config.episode;
    pipeline_config.episodes_per_task = config.grow_episodes_per_task;
    pipeline_config.lr = config.st_lr;
    pipeline_config.epochs = config.st_epochs;
    pipeline_config.l2 = config.st_l2;
    pipeline_config.jobs = config.jobs;
    pipeline_config.mix_demos = config.mix_demos;
    pipeline_config.out_dir = config.out_dir.empty() ? "" : config.out_dir + "/pipeline";
    result.self_train = run_self_training(train_scene, prefs, result.il_params,
                                          config.st_iterations, result.train_tasks,
                                          pipeline_config, mix_seed(seed, "self-train"),
                                          &result.demo_dataset);
    result.st_params = result.self_train.params;

    for (const auto& variant : config.variants) {
        for (const std::string split : {"train", "test"}) {
            const Scene& scene = split == "train" ? train_scene : test_scene;
            const auto& tasks = split == "train" ? result.train_tasks : result.test_tasks;
            PlannerFactory factory =
                variant_factory(variant, scene, prefs, result.il_params, result.st_params);
            const std::vector<EpisodeResult> episodes = run_episodes(
                scene, prefs, tasks, config.episodes_per_task, factory, config.episode,
                mix_seed(seed, "eval-" + variant + "-" + split), "eval", config.jobs);
            for (const auto& ep : episodes) {
                result.eval_episodes.push_back(TracedEpisode{scene_label, variant, split, ep});
            }
        }
    }
    result.report = report_from_episodes(result.eval_episodes);

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path out = config.out_dir;
        fs::create_directories(out / "traces");
        std::vector<std::string> files;
        auto emit = [&](const std::string& rel, const std::string& content) {
            write_file((out / rel).string(), content);
            files.push_back(rel);
        };

        save_tasks(result.demo_tasks, (out / "tasks_demo.json").string());
        save_tasks(result.train_tasks, (out / "tasks_train.json").string());
        save_tasks(result.test_tasks, (out / "tasks_test.json").string());
        files.insert(files.end(), {"tasks_demo.json", "tasks_train.json", "tasks_test.json"});

        export_finetune_jsonl(result.demo_dataset, (out / "demo.jsonl").string());
        files.push_back("demo.jsonl");
        save_params(result.il_params, (out / "params_il.json").string());
        files.push_back("params_il.json");
        for (int k = 1; k <= config.st_iterations; ++k) {
            const std::string tag = std::to_string(k);
            files.push_back("pipeline/grow_" + tag + ".jsonl");
            files.push_back("pipeline/self_train_" + tag + ".jsonl");
            files.push_back("pipeline/params_st" + tag + ".json");
        }

        for (const auto& variant : config.variants) {
            for (const std::string split : {"train", "test"}) {
                std::vector<TracedEpisode> bucket;
                for (const auto& t : result.eval_episodes) {
                    if (t.variant == variant && t.split == split) bucket.push_back(t);
                }
                emit("traces/" + variant + "_" + split + ".jsonl", trace_to_jsonl(bucket));
            }
        }

        emit("report.csv", report_to_csv(result.report));
        emit("report.json", report_to_json_text(result.report));
        write_manifest(config.out_dir, manifest_kind, seed, config_to_json_text(config), files);
    }
    return result;
}

}  // namespace

ProtocolResult run_protocol(const Scene& scene, const PreferenceDataset& prefs,
                            const ProtocolConfig& config, std::uint64_t seed) {
    return run_pipeline_and_eval(scene, scene, scene.scene_id, prefs, config, seed, "protocol");
}

ProtocolResult run_cross_domain(const Scene& source, const Scene& target,
                                const PreferenceDataset& prefs, const ProtocolConfig& config,
                                std::uint64_t seed) {
    if (source.scene_id == target.scene_id) {
        throw ValidationError("cross-domain evaluation requires two different scenes");
    }
    return run_pipeline_and_eval(source, target, source.scene_id + "->" + target.scene_id, prefs,
                                 config, seed, "cross-domain");
}

void write_manifest(const std::string& out_dir, const std::string& kind, std::uint64_t seed,
                    const std::string& config_json, const std::vector<std::string>& rel_paths,
                    const std::string& filename) {
    namespace fs = std::filesystem;
    json files = json::object();
    for (const auto& rel : rel_paths) {
        const std::string full = (fs::path(out_dir) / rel).string();
        json entry;
        entry["fnv64"] = file_hash_hex(full);
        entry["bytes"] = fs::file_size(full);
        files[rel] = std::move(entry);
    }
    json j;
    j["kind"] = kind;
    j["seed"] = seed;
    j["config"] = parse_json_text(config_json, "manifest config");
    j["files"] = std::move(files);
    write_file((fs::path(out_dir) / filename).string(), j.dump(2) + "\n");
}

}  // namespace tidygrid
