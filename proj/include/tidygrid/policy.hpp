#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tidygrid/graph.hpp"
#include "tidygrid/plan.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

// Trainable parameters of the plan policy. Scores are linear in these weights,
// so the decision-level NLL below is convex. Temperature shapes sampling only;
// fitting leaves it untouched.
struct PolicyParams {
    using Key = std::pair<std::string, std::string>;
    std::map<Key, double> pair_weights;  // (obj_type, rec_type)
    std::map<Key, double> room_weights;  // (obj_type, room_type)
    double explore_bias = 0.0;
    double temperature = 1.0;

    double pair_weight(const std::string& obj_type, const std::string& rec_type) const;
    double room_weight(const std::string& obj_type, const std::string& room_type) const;
};

std::string params_to_json_text(const PolicyParams& params);
PolicyParams params_from_json_text(const std::string& text);
void save_params(const PolicyParams& params, const std::string& path);
PolicyParams load_params(const std::string& path);

// What a single plan is trying to achieve: gather information (visit rooms or
// uncover receptacle contents) or move one object onto one receptacle.
struct PlanDecision {
    enum class Kind { explore, rearrange };
    Kind kind = Kind::explore;
    std::vector<std::string> rooms;  // explore: rooms visited, in plan order
    std::string object;              // rearrange
    std::string receptacle;          // rearrange

    friend bool operator==(const PlanDecision&, const PlanDecision&) = default;
};

std::string decision_to_json_text(const PlanDecision& decision);
PlanDecision decision_from_json_text(const std::string& text);

// Everything a planner sees when asked for the next plan.
struct PlannerContext {
    SceneGraph graph;
    std::optional<std::string> held;
    std::string prompt;  // render_prompt(graph).rendered
    int iteration = 0;
    const Scene* scene = nullptr;
};

PlannerContext make_context(const SceneGraph& graph, const Scene& scene, int iteration);

// One softmax alternative: the single explore option or one (object -> receptacle) move.
struct Candidate {
    PlanDecision::Kind kind = PlanDecision::Kind::explore;
    std::string object;
    std::string receptacle;
    std::string obj_type;
    std::string rec_type;
    std::string room_type;
};

// Deterministic candidate order: explore first, then every discovered object
// (rooms in id order, receptacles name-sorted, objects in list order) crossed
// with every discovered receptacle that is not its current holder and has
// spare capacity under current beliefs.
std::vector<Candidate> build_candidates(const PlannerContext& ctx);

// explore: explore_bias + 2 * unvisited_fraction; rearrange: pair + room weight.
double candidate_score(const Candidate& cand, const PolicyParams& params,
                       double unvisited_fraction);

// Softmax over score/temperature (max-shifted, so absolute score level is
// irrelevant), in candidate order.
std::vector<double> candidate_probabilities(const std::vector<Candidate>& candidates,
                                            const PolicyParams& params,
                                            double unvisited_fraction);

std::size_t sample_candidate(const std::vector<Candidate>& candidates,
                             const PolicyParams& params, double unvisited_fraction,
                             std::mt19937_64& rng);

// Renders the shared plan templates for a decision kind against the current
// beliefs. Explore: unvisited rooms in id order; with everything visited, a
// survey of up to five receptacles with unknown contents; failing that, a
// sweep of every room. Rearrange: the six-action fetch-and-place template.
// Returns the plan and the fully populated decision.
std::pair<Plan, PlanDecision> render_decision_plan(const PlanDecision& decision,
                                                   const SceneGraph& graph);

// Classifies a plan back into its single decision. Throws ValidationError on
// plans that move more than one object ("ambiguous multi-move plan").
PlanDecision plan_to_decision(const Plan& plan);

// --- likelihood fitting -----------------------------------------------------

using DecisionDataset = std::vector<std::pair<PlannerContext, PlanDecision>>;

// -sum log P(decision | context, params). Throws when a recorded decision is
// not in its context's candidate set.
double policy_nll(const DecisionDataset& dataset, const PolicyParams& params);

struct PolicyGradient {
    std::map<PolicyParams::Key, double> pair_weights;
    std::map<PolicyParams::Key, double> room_weights;
    double explore_bias = 0.0;
};

// Analytic gradient of policy_nll with respect to the weights and explore
// bias (temperature held fixed).
PolicyGradient policy_nll_gradient(const DecisionDataset& dataset, const PolicyParams& params);

struct FitResult {
    PolicyParams params;
    std::vector<double> loss_trace;  // nll + l2 penalty, one entry per epoch
};

// Minimizes policy_nll + l2 * ||theta||^2 with per-record gradient steps
// (epochs = full passes in a fixed shuffled order). Full-batch steps at the
// default learning rate are unstable at dataset scale, so updates are applied
// per record. Aborts on non-finite loss.
FitResult policy_fit(const DecisionDataset& dataset, const PolicyParams& init, double lr = 0.1,
                     int epochs = 50, double l2 = 1e-4);

// Small uniform weights in [-0.1, 0.1] over every type combination the scene
// and preferences expose: the untrained comparator.
PolicyParams make_baseline_params(const Scene& scene, const PreferenceDataset& prefs,
                                  std::uint64_t seed);

}  // namespace tidygrid
