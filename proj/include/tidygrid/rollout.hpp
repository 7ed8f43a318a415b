#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "tidygrid/dataset.hpp"
#include "tidygrid/planner.hpp"
#include "tidygrid/sim.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

struct EpisodeOptions {
    int horizon = 1000;
    // Safety cap on plan iterations (an episode normally ends on the horizon
    // or when the planner finishes).
    int max_iterations = 200;
    // Extra planner samples per prompt beyond the executed one; the extras
    // are logged with empty outcomes and never acted on.
    int samples_per_prompt = 1;
};

struct EpisodeMetrics {
    double success_rate = 0.0;
    double executability = 1.0;  // 1.0 when nothing was generated
    int unique_placements = 0;
    int reward_sum = 0;
    int plan_iterations = 0;
};

// Per-iteration log entry: enough to replay every metric without the
// simulator.
struct IterationTrace {
    int iteration = 0;
    std::string response;
    int generated = 0;
    int executed = 0;
    std::vector<std::string> outcomes;
    // Successful place events from the plan itself (recovery placements are
    // runner plumbing and excluded).
    std::vector<std::pair<std::string, std::string>> places;
    int reward = 0;      // outcome-level annotation
    int reward_sum = 0;  // raw simulator rewards over plan + recovery
    int t_after = 0;
    std::string error;  // planner failure note; iteration skipped when set
};

struct EpisodeResult {
    std::string task_id;
    std::uint64_t seed = 0;
    int episode_index = 0;
    std::map<std::string, std::vector<std::string>> start_placements;
    std::map<std::string, std::vector<std::string>> end_placements;
    int correct_start = 0;
    int misplaced_start = 0;
    int correct_end = 0;
    int misplaced_end = 0;
    int final_t = 0;
    std::vector<IterationTrace> iterations;
    std::vector<InteractionRecord> records;
    EpisodeMetrics metrics;
};

// Pure recomputation of metrics from the logged fields; replay uses exactly
// this path, so live and replayed metrics cannot diverge.
EpisodeMetrics compute_metrics(const EpisodeResult& episode);

// Runs one task episode: re-plan, execute, log, until the planner finishes,
// the horizon is reached, or the iteration cap trips. A plan (plus the
// hold-nothing recovery that follows it) is first executed against cloned
// simulator/belief state; if it fits the remaining step budget the clones are
// committed, otherwise the episode ends at the pre-plan state, so committed
// time never exceeds the horizon and the hand is always empty between plans.
EpisodeResult run_episode(const Scene& scene, const PreferenceDataset& prefs,
                          const TaskSpec& task, Planner& planner, const EpisodeOptions& options,
                          std::uint64_t seed, int episode_index = 0);

// Builds the planner for one episode slot; called once per (task, episode).
using PlannerFactory = std::function<std::unique_ptr<Planner>(
    const TaskSpec& task, int episode_index, std::uint64_t episode_seed)>;

// tasks x episodes_per_task episodes, slot order task-major. Episode seeds
// derive from (seed_base, seed_label, task_id, episode), so results are
// identical for any `jobs`.
std::vector<EpisodeResult> run_episodes(const Scene& scene, const PreferenceDataset& prefs,
                                        const std::vector<TaskSpec>& tasks, int episodes_per_task,
                                        const PlannerFactory& factory,
                                        const EpisodeOptions& options, std::uint64_t seed_base,
                                        const std::string& seed_label, int jobs = 1);

// Slot-deterministic concurrent map: output i comes from input i regardless
// of scheduling; the first (lowest-index) worker exception is rethrown.
template <typename In, typename Out>
std::vector<Out> parallel_map(const std::vector<In>& inputs, int jobs,
                              const std::function<Out(const In&, std::size_t)>& fn) {
    std::vector<Out> results(inputs.size());
    if (inputs.empty()) return results;
    if (jobs <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) results[i] = fn(inputs[i], i);
        return results;
    }
    std::vector<std::exception_ptr> errors(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= inputs.size()) return;
            try {
                results[i] = fn(inputs[i], i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), inputs.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace tidygrid
