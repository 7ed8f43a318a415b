#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidygrid/pipeline.hpp"
#include "tidygrid/rollout.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

// --- metrics -----------------------------------------------------------------

// (correct_end - correct_start) / misplaced_start. Throws when the start
// state has no misplaced objects.
double success_rate(const WorldState& start, const WorldState& end, const Scene& scene,
                    const PreferenceDataset& prefs);

struct Aggregate {
    double mean = 0.0;
    double sem = 0.0;  // sample (n-1) standard deviation / sqrt(n)
    int n = 0;
};

// Throws when fewer than two values (SEM undefined).
Aggregate aggregate(const std::vector<double>& values);

// One-sided sign test: P[X >= successes] for X ~ Binomial(trials, 1/2).
double sign_test_p(int successes, int trials);

// --- reports -----------------------------------------------------------------

struct ReportRow {
    std::string scene;    // scene id, or "source->target" for cross-domain
    std::string variant;  // base | il | st1 | st2 | demonstrator
    std::string split;    // train | test
    Aggregate success;
    Aggregate executability;
    Aggregate unique_placements;
};

struct AggregateReport {
    // Rows are kept lexicographically sorted by (scene, variant, split) so
    // live runs and trace replays produce identical files.
    std::vector<ReportRow> rows;
};

// scene,variant,split,mean,sem,n — the success-rate table.
std::string report_to_csv(const AggregateReport& report);
std::string report_to_json_text(const AggregateReport& report);
AggregateReport report_from_json_text(const std::string& text);

// --- episode traces ----------------------------------------------------------

struct TracedEpisode {
    std::string scene;  // report scene label
    std::string variant;
    std::string split;
    EpisodeResult episode;
};

std::string trace_to_jsonl(const std::vector<TracedEpisode>& episodes);
std::vector<TracedEpisode> trace_from_jsonl(const std::string& text);

// Recomputes the report from persisted traces alone (no simulation); the
// result is identical to the live run's report.
AggregateReport replay_traces(const std::vector<std::string>& trace_paths);

// --- protocols ---------------------------------------------------------------

// `count` tasks drawn from mix_seed(seed, label, i); `label` keeps the demo,
// train, and test streams independent.
std::vector<TaskSpec> generate_task_set(const Scene& scene, const PreferenceDataset& prefs,
                                        int count, std::uint64_t seed, const std::string& label);

// Throws when any task id appears in more than one set.
void require_disjoint_tasks(const std::vector<const std::vector<TaskSpec>*>& sets);

// Planner factory for a report variant: "base", "demonstrator", "il", or
// "st<k>" (1-based index into `st`). `scene` and `prefs` must outlive the
// returned factory; parameter sets are copied.
PlannerFactory variant_factory(const std::string& variant, const Scene& scene,
                               const PreferenceDataset& prefs, const PolicyParams& il,
                               const std::vector<PolicyParams>& st);

struct ProtocolConfig {
    int demo_task_count = 10;
    int train_task_count = 20;
    int test_task_count = 5;
    int episodes_per_task = 5;       // demo collection and evaluation
    int grow_episodes_per_task = 10; // self-training rollouts (richer grow sets)
    int st_iterations = 2;
    EpisodeOptions episode;
    // Imitation fit.
    double lr = 0.1;
    int epochs = 50;
    double l2 = 1e-4;
    // Self-training fits: gentler steps, demos mixed in as an anchor so the
    // positives-only data cannot collapse the explore/rearrange balance.
    double st_lr = 0.035;
    int st_epochs = 50;
    double st_l2 = 1e-4;
    bool mix_demos = true;
    int jobs = 1;
    std::vector<std::string> variants = {"base", "il", "st1", "st2"};
    // When non-empty: tasks, datasets, params, traces, reports, and the run
    // manifest are written under this directory.
    std::string out_dir;
};

struct ProtocolResult {
    AggregateReport report;
    PolicyParams il_params;
    std::vector<PolicyParams> st_params;
    std::vector<TaskSpec> demo_tasks;
    std::vector<TaskSpec> train_tasks;
    std::vector<TaskSpec> test_tasks;
    Dataset demo_dataset;
    SelfTrainResult self_train;
    std::vector<TracedEpisode> eval_episodes;
};

// Samples disjoint demo/train/test task sets from the seed, runs the full
// demos -> IL -> self-training pipeline, then evaluates every configured
// variant on the train and test splits.
ProtocolResult run_protocol(const Scene& scene, const PreferenceDataset& prefs,
                            const ProtocolConfig& config, std::uint64_t seed);

// Pipeline on the source scene; evaluation on the source train split and the
// target scene's test split. Scene label: "<source>-><target>".
ProtocolResult run_cross_domain(const Scene& source, const Scene& target,
                                const PreferenceDataset& prefs, const ProtocolConfig& config,
                                std::uint64_t seed);

// Rows for a set of already-run eval episodes (grouped by scene label,
// variant, split; sorted canonically).
AggregateReport report_from_episodes(const std::vector<TracedEpisode>& episodes);

// --- run manifest ------------------------------------------------------------

// Writes out_dir/<filename> listing every produced file (relative path ->
// FNV-1a content hash + size) plus the seed and config echo.
void write_manifest(const std::string& out_dir, const std::string& kind, std::uint64_t seed,
                    const std::string& config_json, const std::vector<std::string>& rel_paths,
                    const std::string& filename = "manifest.json");

}  // namespace tidygrid
