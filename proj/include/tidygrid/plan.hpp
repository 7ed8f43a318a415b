#pragma once

#include <string>
#include <vector>

#include "tidygrid/base.hpp"

namespace tidygrid {

// The four high-level verbs executed by the controller.
struct HighLevelAction {
    enum class Verb { go_to, look_at, pick_up, place };
    Verb verb = Verb::go_to;
    std::string arg1;  // entity (go to / look at), object (pick up / place)
    std::string arg2;  // receptacle (place only)

    friend bool operator==(const HighLevelAction&, const HighLevelAction&) = default;
};

std::string render_action(const HighLevelAction& action);

struct SkippedFragment {
    std::string fragment;
    std::string reason;
};

struct Plan {
    std::vector<HighLevelAction> actions;  // at most 10 after truncation
    std::string source_text;

    bool empty() const { return actions.empty(); }
    friend bool operator==(const Plan& a, const Plan& b) { return a.actions == b.actions; }
};

struct ParsedPlan {
    Plan plan;
    std::vector<SkippedFragment> skipped;

    // Fragments the planner produced, parsed or not; the executability metric
    // divides executed actions by this.
    int generated_count() const {
        return static_cast<int>(plan.actions.size() + skipped.size());
    }
};

inline constexpr int kMaxPlanLength = 10;

// Total on arbitrary input: splits on commas/newlines, strips list numbering,
// matches verbs case-insensitively, reports unmatched fragments in `skipped`,
// and keeps only the first 10 parsed actions (fragments after the cutoff are
// ignored). Never throws; an unusable response simply yields an empty plan.
ParsedPlan parse_plan(const std::string& text);

// Canonical lowercase comma-separated text; parse_plan(render_plan(p))
// reproduces p exactly.
std::string render_plan(const Plan& plan);

}  // namespace tidygrid
