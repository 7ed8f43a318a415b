#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tidygrid/plan.hpp"
#include "tidygrid/policy.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

// One planning turn's output. generated_count includes fragments that failed
// to parse (relevant for the endpoint planner); template planners generate
// exactly their actions.
struct PlanProposal {
    Plan plan;
    PlanDecision decision;
    std::string response_text;
    int generated_count = 0;
    // Planner-level failure (e.g. endpoint transport error): the iteration is
    // logged as skipped and the episode moves on.
    std::optional<std::string> error;
};

// A planner is stateless across turns given (context, seed); implementations
// are safe to use from concurrent episodes.
class Planner {
  public:
    virtual ~Planner() = default;
    virtual std::string name() const = 0;
    // Empty result means the planner considers the task finished.
    virtual std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) = 0;
};

// Oracle-guided planner used to produce imitation data. Priority order:
// 1. any unvisited room -> exploration plan (one visit per unvisited room);
// 2. a discovered misplaced object with a discovered, spare-capacity correct
//    receptacle -> six-action move template (object and target drawn
//    uniformly at random);
// 3. any receptacle with unknown contents -> re-exploration (survey) plan;
// 4. otherwise the belief graph is complete and fully tidy -> no plan.
class DemonstratorPlanner : public Planner {
  public:
    explicit DemonstratorPlanner(const PreferenceDataset* prefs) : prefs_(prefs) {}
    std::string name() const override { return "demonstrator"; }
    std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) override;

  private:
    const PreferenceDataset* prefs_;
};

// Samples one candidate from the softmax over candidate scores and renders
// the same plan templates the demonstrator uses. Never finishes on its own.
class PolicyPlanner : public Planner {
  public:
    explicit PolicyPlanner(PolicyParams params) : params_(std::move(params)) {}
    std::string name() const override { return "policy"; }
    std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) override;
    const PolicyParams& params() const { return params_; }

  private:
    PolicyParams params_;
};

// The untrained comparator: a policy planner over small random weights drawn
// once from the construction seed.
class BaselinePlanner : public Planner {
  public:
    BaselinePlanner(const Scene& scene, const PreferenceDataset& prefs, std::uint64_t seed);
    std::string name() const override { return "baseline"; }
    std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) override;
    const PolicyParams& params() const { return inner_.params(); }

  private:
    PolicyPlanner inner_;
};

// Replays a fixed list of response texts through the plan parser; exhausted
// -> no plan. Test and replay utility.
class ScriptedPlanner : public Planner {
  public:
    explicit ScriptedPlanner(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    std::string name() const override { return "scripted"; }
    std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) override;

  private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

// Builds a proposal from raw response text: parse, truncate, classify. Plans
// that move several distinct objects are cut after their first completed move
// so every proposal carries exactly one decision.
PlanProposal proposal_from_response(const std::string& response);

// Free-function forms mirroring the planner classes.
Plan demonstrator_plan(const PlannerContext& ctx, const PreferenceDataset& prefs,
                       std::uint64_t seed);
Plan policy_plan(const PlannerContext& ctx, const PolicyParams& params, std::uint64_t seed);
Plan baseline_plan(const PlannerContext& ctx, std::uint64_t seed);

}  // namespace tidygrid
