// Python bindings for the tidygrid core: scenes, preferences, tasks, the plan
// language, policy parameters, episode rollouts, the training pipeline, and
// the evaluation protocols. Long-running entry points release the GIL.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tidygrid/base.hpp"
#include "tidygrid/dataset.hpp"
#include "tidygrid/eval.hpp"
#include "tidygrid/pipeline.hpp"
#include "tidygrid/plan.hpp"
#include "tidygrid/planner.hpp"
#include "tidygrid/policy.hpp"
#include "tidygrid/rollout.hpp"
#include "tidygrid/world.hpp"

namespace py = pybind11;
using namespace tidygrid;

namespace {

// Planner construction shared by run_episode: a named variant plus optional
// policy parameters (required for "policy").
std::unique_ptr<Planner> make_planner(const std::string& variant, const Scene& scene,
                                      const PreferenceDataset& prefs,
                                      const std::optional<PolicyParams>& params,
                                      std::uint64_t seed) {
    if (variant == "demonstrator") return std::make_unique<DemonstratorPlanner>(&prefs);
    if (variant == "base") return std::make_unique<BaselinePlanner>(scene, prefs, seed);
    if (variant == "policy") {
        if (!params) throw ValidationError("variant 'policy' requires params");
        return std::make_unique<PolicyPlanner>(*params);
    }
    throw ValidationError("unknown planner variant '" + variant +
                          "' (expected demonstrator, base, or policy)");
}

}  // namespace

PYBIND11_MODULE(_tidygrid, m) {
    m.doc() =
        "Desk-scale household-tidying lab: partially observable grid simulator, "
        "plan language, imitation + self-training pipeline, evaluation protocols.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<ParseError>(m, "PlanParseError");
    py::register_exception<IoError>(m, "IoError");

    // --- seeds ---------------------------------------------------------------
    m.def("mix_seed",
          py::overload_cast<std::uint64_t, std::string_view>(&mix_seed),
          py::arg("seed"), py::arg("label"),
          "Derive a named child seed from a parent seed.");
    m.def("mix_seed",
          py::overload_cast<std::uint64_t, std::string_view, std::uint64_t>(&mix_seed),
          py::arg("seed"), py::arg("label"), py::arg("n"));
    m.def("fnv1a64", [](const std::string& bytes) { return fnv1a64(bytes); },
          py::arg("bytes"), "Platform-stable FNV-1a content hash.");

    // --- world ----------------------------------------------------------------
    py::class_<Scene>(m, "Scene")
        .def_readonly("scene_id", &Scene::scene_id)
        .def_property_readonly("room_names",
                               [](const Scene& s) {
                                   std::vector<std::string> names;
                                   names.reserve(s.rooms.size());
                                   for (const auto& r : s.rooms) names.push_back(r.name());
                                   return names;
                               })
        .def("receptacle_names", &Scene::receptacle_names)
        .def("validate", &Scene::validate)
        .def("to_json", [](const Scene& s) { return scene_to_json_text(s); })
        .def_static("from_json",
                    [](const std::string& text) { return scene_from_json_text(text); },
                    py::arg("text"))
        .def("__repr__", [](const Scene& s) {
            return "<Scene '" + s.scene_id + "' with " + std::to_string(s.rooms.size()) +
                   " rooms>";
        });

    py::class_<PreferenceDataset>(m, "PreferenceDataset")
        .def(py::init<>())
        .def_readwrite("entries", &PreferenceDataset::entries)
        .def("correct", &PreferenceDataset::correct, py::arg("obj_type"), py::arg("room_type"),
             py::arg("rec_type"))
        .def("to_json", [](const PreferenceDataset& p) { return prefs_to_json_text(p); })
        .def_static("from_json",
                    [](const std::string& text) { return prefs_from_json_text(text); },
                    py::arg("text"))
        .def("__repr__", [](const PreferenceDataset& p) {
            return "<PreferenceDataset with " + std::to_string(p.entries.size()) +
                   " object types>";
        });

    py::class_<TaskSpec>(m, "TaskSpec")
        .def_readonly("task_id", &TaskSpec::task_id)
        .def_readonly("scene_id", &TaskSpec::scene_id)
        .def_readonly("seed", &TaskSpec::seed)
        .def_property_readonly("placements",
                               [](const TaskSpec& t) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   out.reserve(t.placements.size());
                                   for (const auto& [obj, rec] : t.placements)
                                       out.emplace_back(obj.name(), rec);
                                   return out;
                               })
        .def("to_json", [](const TaskSpec& t) { return task_to_json_text(t); })
        .def_static("from_json",
                    [](const std::string& text) { return task_from_json_text(text); },
                    py::arg("text"))
        .def("__repr__", [](const TaskSpec& t) {
            return "<TaskSpec '" + t.task_id + "' (" + std::to_string(t.placements.size()) +
                   " objects)>";
        });

    m.def("builtin_scenes", &builtin_scenes, "The four fixed household layouts.");
    m.def("builtin_object_types", &builtin_object_types);
    m.def("generate_prefs", &generate_prefs, py::arg("scenes"), py::arg("object_types"),
          py::arg("seed"), py::arg("min_pairs") = 1, py::arg("max_pairs") = 3);
    m.def("generate_task", &generate_task, py::arg("scene"), py::arg("prefs"), py::arg("seed"),
          "A solvable tidying task: 5-10 objects, 3-7 misplaced.");
    m.def("generate_task_set", &generate_task_set, py::arg("scene"), py::arg("prefs"),
          py::arg("count"), py::arg("seed"), py::arg("label"));
    m.def("is_correct_placement", &is_correct_placement, py::arg("obj_name"),
          py::arg("rec_name"), py::arg("scene"), py::arg("prefs"));

    // --- plan language ---------------------------------------------------------
    py::class_<ParsedPlan>(m, "ParsedPlan")
        .def_property_readonly("actions",
                               [](const ParsedPlan& p) {
                                   std::vector<std::string> out;
                                   out.reserve(p.plan.actions.size());
                                   for (const auto& a : p.plan.actions)
                                       out.push_back(render_action(a));
                                   return out;
                               })
        .def_property_readonly("skipped",
                               [](const ParsedPlan& p) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   out.reserve(p.skipped.size());
                                   for (const auto& s : p.skipped)
                                       out.emplace_back(s.fragment, s.reason);
                                   return out;
                               })
        .def_property_readonly("generated_count", &ParsedPlan::generated_count)
        .def_property_readonly("canonical",
                               [](const ParsedPlan& p) { return render_plan(p.plan); })
        .def("__repr__", [](const ParsedPlan& p) {
            return "<ParsedPlan with " + std::to_string(p.plan.actions.size()) + " actions, " +
                   std::to_string(p.skipped.size()) + " skipped>";
        });
    m.def("parse_plan", &parse_plan, py::arg("text"),
          "Total parser: never throws; unmatched fragments land in .skipped.");

    // --- policy -----------------------------------------------------------------
    py::class_<PolicyParams>(m, "PolicyParams")
        .def(py::init<>())
        .def_readwrite("pair_weights", &PolicyParams::pair_weights)
        .def_readwrite("room_weights", &PolicyParams::room_weights)
        .def_readwrite("explore_bias", &PolicyParams::explore_bias)
        .def_readwrite("temperature", &PolicyParams::temperature)
        .def("to_json", [](const PolicyParams& p) { return params_to_json_text(p); })
        .def_static("from_json",
                    [](const std::string& text) { return params_from_json_text(text); },
                    py::arg("text"))
        .def("__repr__", [](const PolicyParams& p) {
            return "<PolicyParams with " + std::to_string(p.pair_weights.size()) +
                   " pair weights, " + std::to_string(p.room_weights.size()) +
                   " room weights>";
        });
    m.def("make_baseline_params", &make_baseline_params, py::arg("scene"), py::arg("prefs"),
          py::arg("seed"), "Small random weights: the untrained comparator.");

    // --- episodes ----------------------------------------------------------------
    py::class_<EpisodeMetrics>(m, "EpisodeMetrics")
        .def_readonly("success_rate", &EpisodeMetrics::success_rate)
        .def_readonly("executability", &EpisodeMetrics::executability)
        .def_readonly("unique_placements", &EpisodeMetrics::unique_placements)
        .def_readonly("reward_sum", &EpisodeMetrics::reward_sum)
        .def_readonly("plan_iterations", &EpisodeMetrics::plan_iterations)
        .def("__repr__", [](const EpisodeMetrics& e) {
            return "<EpisodeMetrics success=" + std::to_string(e.success_rate) +
                   " executability=" + std::to_string(e.executability) + ">";
        });

    py::class_<EpisodeResult>(m, "EpisodeResult")
        .def_readonly("task_id", &EpisodeResult::task_id)
        .def_readonly("seed", &EpisodeResult::seed)
        .def_readonly("episode_index", &EpisodeResult::episode_index)
        .def_readonly("start_placements", &EpisodeResult::start_placements)
        .def_readonly("end_placements", &EpisodeResult::end_placements)
        .def_readonly("correct_start", &EpisodeResult::correct_start)
        .def_readonly("misplaced_start", &EpisodeResult::misplaced_start)
        .def_readonly("correct_end", &EpisodeResult::correct_end)
        .def_readonly("misplaced_end", &EpisodeResult::misplaced_end)
        .def_readonly("final_t", &EpisodeResult::final_t)
        .def_readonly("metrics", &EpisodeResult::metrics)
        .def_property_readonly("plan_iterations", [](const EpisodeResult& e) {
            return e.iterations.size();
        });

    m.def(
        "run_episode",
        [](const Scene& scene, const PreferenceDataset& prefs, const TaskSpec& task,
           const std::string& variant, const std::optional<PolicyParams>& params,
           std::uint64_t seed, int horizon, int max_iterations) {
            EpisodeOptions options;
            options.horizon = horizon;
            options.max_iterations = max_iterations;
            auto planner = make_planner(variant, scene, prefs, params, seed);
            return run_episode(scene, prefs, task, *planner, options, seed);
        },
        py::arg("scene"), py::arg("prefs"), py::arg("task"), py::arg("variant") = "demonstrator",
        py::arg("params") = std::nullopt, py::arg("seed") = 0, py::arg("horizon") = 1000,
        py::arg("max_iterations") = 200, py::call_guard<py::gil_scoped_release>(),
        "One planning episode with a named planner: demonstrator, base, or policy.");

    // --- datasets and training ------------------------------------------------
    py::class_<InteractionRecord>(m, "InteractionRecord")
        .def_readonly("prompt", &InteractionRecord::prompt)
        .def_readonly("response", &InteractionRecord::response)
        .def_readonly("outcomes", &InteractionRecord::outcomes)
        .def_readonly("reward", &InteractionRecord::reward)
        .def_readonly("task_id", &InteractionRecord::task_id)
        .def_readonly("episode", &InteractionRecord::episode)
        .def_readonly("iteration", &InteractionRecord::iteration)
        .def_readonly("generated", &InteractionRecord::generated)
        .def_readonly("executed", &InteractionRecord::executed);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("kind",
                               [](const Dataset& d) { return to_string(d.kind); })
        .def_readonly("scene_id", &Dataset::scene_id)
        .def_readonly("seed", &Dataset::seed)
        .def_readonly("iteration", &Dataset::iteration)
        .def_readonly("records", &Dataset::records)
        .def("to_jsonl",
             [](const Dataset& d, bool include_reward) {
                 return dataset_to_jsonl(d, include_reward);
             },
             py::arg("include_reward") = true)
        .def_static("from_jsonl",
                    [](const std::string& text) { return dataset_from_jsonl(text); },
                    py::arg("text"))
        .def("__len__", [](const Dataset& d) { return d.records.size(); })
        .def("__repr__", [](const Dataset& d) {
            return "<Dataset " + to_string(d.kind) + " with " +
                   std::to_string(d.records.size()) + " records>";
        });

    m.def("collect_demos", &collect_demos, py::arg("scene"), py::arg("prefs"), py::arg("tasks"),
          py::arg("episodes_per_task"), py::arg("seed"), py::arg("options") = EpisodeOptions{},
          py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>(),
          "Demonstrator rollouts: the imitation dataset.");
    m.def("fit_il", &fit_il, py::arg("demo"), py::arg("scene"),
          py::arg("init") = PolicyParams{}, py::arg("lr") = 0.1, py::arg("epochs") = 50,
          py::arg("l2") = 1e-4, py::call_guard<py::gil_scoped_release>(),
          "Likelihood fit over the demo decisions.");

    py::class_<EpisodeOptions>(m, "EpisodeOptions")
        .def(py::init<>())
        .def_readwrite("horizon", &EpisodeOptions::horizon)
        .def_readwrite("max_iterations", &EpisodeOptions::max_iterations)
        .def_readwrite("samples_per_prompt", &EpisodeOptions::samples_per_prompt);

    // --- evaluation ---------------------------------------------------------------
    py::class_<Aggregate>(m, "Aggregate")
        .def_readonly("mean", &Aggregate::mean)
        .def_readonly("sem", &Aggregate::sem)
        .def_readonly("n", &Aggregate::n)
        .def("__repr__", [](const Aggregate& a) {
            return "<Aggregate mean=" + std::to_string(a.mean) + " sem=" +
                   std::to_string(a.sem) + " n=" + std::to_string(a.n) + ">";
        });
    m.def("aggregate", &aggregate, py::arg("values"),
          "Mean and standard error (sample n-1); needs at least two values.");
    m.def("sign_test_p", &sign_test_p, py::arg("successes"), py::arg("trials"),
          "One-sided sign test p-value.");

    py::class_<ReportRow>(m, "ReportRow")
        .def_readonly("scene", &ReportRow::scene)
        .def_readonly("variant", &ReportRow::variant)
        .def_readonly("split", &ReportRow::split)
        .def_readonly("success", &ReportRow::success)
        .def_readonly("executability", &ReportRow::executability)
        .def_readonly("unique_placements", &ReportRow::unique_placements);

    py::class_<AggregateReport>(m, "AggregateReport")
        .def_readonly("rows", &AggregateReport::rows)
        .def("to_csv", [](const AggregateReport& r) { return report_to_csv(r); })
        .def("to_json", [](const AggregateReport& r) { return report_to_json_text(r); })
        .def_static("from_json",
                    [](const std::string& text) { return report_from_json_text(text); },
                    py::arg("text"));

    py::class_<ProtocolConfig>(m, "ProtocolConfig")
        .def(py::init<>())
        .def_readwrite("demo_task_count", &ProtocolConfig::demo_task_count)
        .def_readwrite("train_task_count", &ProtocolConfig::train_task_count)
        .def_readwrite("test_task_count", &ProtocolConfig::test_task_count)
        .def_readwrite("episodes_per_task", &ProtocolConfig::episodes_per_task)
        .def_readwrite("grow_episodes_per_task", &ProtocolConfig::grow_episodes_per_task)
        .def_readwrite("st_iterations", &ProtocolConfig::st_iterations)
        .def_readwrite("episode", &ProtocolConfig::episode)
        .def_readwrite("lr", &ProtocolConfig::lr)
        .def_readwrite("epochs", &ProtocolConfig::epochs)
        .def_readwrite("l2", &ProtocolConfig::l2)
        .def_readwrite("st_lr", &ProtocolConfig::st_lr)
        .def_readwrite("st_epochs", &ProtocolConfig::st_epochs)
        .def_readwrite("st_l2", &ProtocolConfig::st_l2)
        .def_readwrite("mix_demos", &ProtocolConfig::mix_demos)
        .def_readwrite("jobs", &ProtocolConfig::jobs)
        .def_readwrite("variants", &ProtocolConfig::variants)
        .def_readwrite("out_dir", &ProtocolConfig::out_dir);

    py::class_<ProtocolResult>(m, "ProtocolResult")
        .def_readonly("report", &ProtocolResult::report)
        .def_readonly("il_params", &ProtocolResult::il_params)
        .def_readonly("st_params", &ProtocolResult::st_params)
        .def_readonly("demo_tasks", &ProtocolResult::demo_tasks)
        .def_readonly("train_tasks", &ProtocolResult::train_tasks)
        .def_readonly("test_tasks", &ProtocolResult::test_tasks)
        .def_readonly("demo_dataset", &ProtocolResult::demo_dataset);

    m.def("run_protocol", &run_protocol, py::arg("scene"), py::arg("prefs"),
          py::arg("config") = ProtocolConfig{}, py::arg("seed") = 0,
          py::call_guard<py::gil_scoped_release>(),
          "Demos -> imitation -> self-training -> evaluation on train/test splits.");
    m.def("run_cross_domain", &run_cross_domain, py::arg("source"), py::arg("target"),
          py::arg("prefs"), py::arg("config") = ProtocolConfig{}, py::arg("seed") = 0,
          py::call_guard<py::gil_scoped_release>(),
          "Train on the source scene, evaluate on the target scene's test tasks.");
}
