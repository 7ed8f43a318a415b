#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidygrid/dataset.hpp"
#include "tidygrid/policy.hpp"
#include "tidygrid/rollout.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

struct PipelineConfig {
    EpisodeOptions episode;
    int episodes_per_task = 5;
    double lr = 0.1;
    int epochs = 50;
    double l2 = 1e-4;
    int jobs = 1;
    // Mix demonstration pairs into self-training fits (off by default: each
    // fit uses only the filtered positives, continuing from the previous
    // parameters).
    bool mix_demos = false;
    // When non-empty, every intermediate dataset and parameter file is
    // written here.
    std::string out_dir;
};

// Demonstrator rollouts over the demo tasks; one record per plan iteration,
// rewards filled from outcomes at collection time.
Dataset collect_demos(const Scene& scene, const PreferenceDataset& prefs,
                      const std::vector<TaskSpec>& tasks, int episodes_per_task,
                      std::uint64_t seed, const EpisodeOptions& options = {}, int jobs = 1);

// Imitation bootstrap: likelihood fit over the demo decisions.
PolicyParams fit_il(const Dataset& demo, const Scene& scene, const PolicyParams& init,
                    double lr = 0.1, int epochs = 50, double l2 = 1e-4);

// Policy rollouts over the train tasks; the raw interaction log of one
// self-training iteration.
Dataset grow(const Scene& scene, const PreferenceDataset& prefs, const PolicyParams& params,
             const std::vector<TaskSpec>& train_tasks, int episodes_per_task, std::uint64_t seed,
             const EpisodeOptions& options = {}, int jobs = 1);

// Recomputes every record's reward from its outcome strings.
Dataset annotate(const Dataset& dataset, const Scene& scene, const PreferenceDataset& prefs);

// Keeps records with reward > 0 (order preserved); result kind: self_train.
Dataset filter_positive(const Dataset& dataset);

struct SelfTrainResult {
    std::vector<PolicyParams> params;        // params after iteration k (1-based)
    std::vector<Dataset> grow_datasets;      // annotated
    std::vector<Dataset> self_train_sets;    // filtered positives
    std::vector<std::vector<double>> loss_traces;
    std::vector<std::string> warnings;       // e.g. empty filtered set
};

// grow -> annotate -> filter -> fit, `iterations` times, each fit continuing
// from the previous parameters; an empty filtered set leaves the parameters
// unchanged for that iteration. `demos` is only read when config.mix_demos.
SelfTrainResult run_self_training(const Scene& scene, const PreferenceDataset& prefs,
                                  const PolicyParams& params0, int iterations,
                                  const std::vector<TaskSpec>& train_tasks,
                                  const PipelineConfig& config, std::uint64_t seed,
                                  const Dataset* demos = nullptr);

}  // namespace tidygrid
