#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidygrid/policy.hpp"

namespace tidygrid {

// One prompt -> response -> execution round, the unit of both imitation and
// self-training data.
struct InteractionRecord {
    std::string prompt;
    std::string response;
    PlanDecision decision;
    std::vector<std::string> outcomes;  // "obj moved from recA to recB"
    int reward = 0;                     // in {-1, 0, 1} once annotated
    std::string task_id;
    int episode = 0;
    int iteration = 0;
    int generated = 0;  // high-level actions the planner produced
    int executed = 0;   // of those, how many the controller completed

    friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

struct Dataset {
    enum class Kind { demo, grow, self_train };
    Kind kind = Kind::demo;
    std::string scene_id;
    std::uint64_t seed = 0;
    int iteration = 0;  // self-training iteration that produced it (0 = IL stage)
    std::vector<InteractionRecord> records;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

std::string to_string(Dataset::Kind kind);
Dataset::Kind dataset_kind_from_string(const std::string& s);

// JSONL: a header object {"dataset_kind", "scene_id", "seed", "iteration"}
// followed by one record object {"prompt", "completion", "reward", "meta"}
// per line, keys in stable (alphabetical) order. include_reward=false drops
// the reward field (export for loss-masked fine-tuning of demo data).
std::string dataset_to_jsonl(const Dataset& dataset, bool include_reward = true);
Dataset dataset_from_jsonl(const std::string& text);
void export_finetune_jsonl(const Dataset& dataset, const std::string& path,
                           bool include_reward = true);
Dataset import_finetune_jsonl(const std::string& path);

// (context, decision) pairs for likelihood fitting: contexts are rebuilt by
// parsing each record's prompt back into a belief graph over `scene`.
DecisionDataset decision_pairs(const Dataset& dataset, const Scene& scene);

// --- outcome strings ---------------------------------------------------------

struct Movement {
    std::string object;
    std::string from;
    std::string to;
};

// "pan 1 moved from kitchen 0 table 6 to kitchen 0 counter 1"
std::string format_outcome(const Movement& m);
Movement parse_outcome_string(const std::string& s);

// Net reward of one interaction from its outcome strings: +1 when the moved
// object went from a wrong to a correct receptacle, -1 for correct to wrong,
// 0 otherwise. Equals the simulator rewards accrued over the interaction.
// Throws ValidationError when outcomes move more than one distinct object
// (planner contract violation: plans carry a single decision).
int outcome_reward(const std::vector<std::string>& outcomes, const Scene& scene,
                   const PreferenceDataset& prefs);

}  // namespace tidygrid
