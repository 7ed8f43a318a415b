#include "tidygrid/planner.hpp"

#include <set>

#include "tidygrid/base.hpp"
#include "tidygrid/names.hpp"

namespace tidygrid {

namespace {

PlanProposal template_proposal(std::pair<Plan, PlanDecision> rendered) {
    PlanProposal p;
    p.plan = std::move(rendered.first);
    p.decision = std::move(rendered.second);
    p.response_text = p.plan.source_text;
    p.generated_count = static_cast<int>(p.plan.actions.size());
    return p;
}

}  // namespace

std::optional<PlanProposal> DemonstratorPlanner::propose(const PlannerContext& ctx,
                                                         std::uint64_t seed) {
    if (ctx.scene == nullptr) throw ValidationError("planner context requires a scene");
    const SceneGraph& graph = ctx.graph;
    const Scene& scene = *ctx.scene;

    bool any_unvisited = false;
    for (const auto& room : graph.rooms) any_unvisited = any_unvisited || !room.visited;
    if (any_unvisited) {
        return template_proposal(render_decision_plan(PlanDecision{}, graph));
    }

    // Known receptacles that can take one more object, grouped for the
    // correctness check. Only contents-known receptacles qualify as targets:
    // their believed load is exact, so a placement can never bounce off a
    // full receptacle.
    struct Target {
        std::string name;
        std::string rec_type;
        std::string room_type;
    };
    std::vector<Target> open_targets;
    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            if (!node.contents_known) continue;
            RecRef ref = scene.find_receptacle(rec_name);
            if (!ref.valid()) continue;
            if (static_cast<int>(node.objects.size()) >= scene.receptacle(ref).capacity) continue;
            const ReceptacleName parsed = parse_receptacle_name(rec_name);
            open_targets.push_back(Target{rec_name, parsed.rec_type, parsed.room.room_type});
        }
    }

    struct Option {
        std::string object;
        std::vector<std::string> targets;
    };
    std::vector<Option> options;
    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            for (const auto& obj : node.objects) {
                const ObjectName obj_name = parse_object_name(obj);
                if (!prefs_->has(obj_name.obj_type)) continue;
                if (is_correct_placement(obj, rec_name, scene, *prefs_)) continue;
                Option option{obj, {}};
                for (const auto& target : open_targets) {
                    if (target.name == rec_name) continue;
                    if (prefs_->correct(obj_name.obj_type, target.room_type, target.rec_type)) {
                        option.targets.push_back(target.name);
                    }
                }
                if (!option.targets.empty()) options.push_back(std::move(option));
            }
        }
    }

    if (!options.empty()) {
        auto rng = make_rng(mix_seed(seed, "demonstrator"));
        const Option& option = options[uniform_index(rng, options.size())];
        const std::string& target = option.targets[uniform_index(rng, option.targets.size())];
        PlanDecision decision;
        decision.kind = PlanDecision::Kind::rearrange;
        decision.object = option.object;
        decision.receptacle = target;
        return template_proposal(render_decision_plan(decision, graph));
    }

    bool any_unknown = false;
    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            any_unknown = any_unknown || !node.contents_known;
        }
    }
    if (any_unknown) {
        // Re-exploration: with every room visited this renders the survey of
        // unknown-content receptacles.
        return template_proposal(render_decision_plan(PlanDecision{}, graph));
    }

    // Beliefs are complete and every known object sits on a correct
    // receptacle: the task is done.
    return std::nullopt;
}

std::optional<PlanProposal> PolicyPlanner::propose(const PlannerContext& ctx,
                                                   std::uint64_t seed) {
    const std::vector<Candidate> candidates = build_candidates(ctx);
    auto rng = make_rng(mix_seed(seed, "policy-sample"));
    const std::size_t idx =
        sample_candidate(candidates, params_, ctx.graph.unvisited_fraction(), rng);

    PlanDecision decision;
    if (candidates[idx].kind == PlanDecision::Kind::rearrange) {
        decision.kind = PlanDecision::Kind::rearrange;
        decision.object = candidates[idx].object;
        decision.receptacle = candidates[idx].receptacle;
    }
    return template_proposal(render_decision_plan(decision, ctx.graph));
}

BaselinePlanner::BaselinePlanner(const Scene& scene, const PreferenceDataset& prefs,
                                 std::uint64_t seed)
    : inner_(make_baseline_params(scene, prefs, seed)) {}

std::optional<PlanProposal> BaselinePlanner::propose(const PlannerContext& ctx,
                                                     std::uint64_t seed) {
    return inner_.propose(ctx, seed);
}

std::optional<PlanProposal> ScriptedPlanner::propose(const PlannerContext& ctx,
                                                     std::uint64_t seed) {
    (void)ctx;
    (void)seed;
    if (next_ >= responses_.size()) return std::nullopt;
    return proposal_from_response(responses_[next_++]);
}

PlanProposal proposal_from_response(const std::string& response) {
    ParsedPlan parsed = parse_plan(response);
    PlanProposal p;
    p.response_text = response;
    p.generated_count = parsed.generated_count();

    std::set<std::pair<std::string, std::string>> moves;
    for (const auto& action : parsed.plan.actions) {
        if (action.verb == HighLevelAction::Verb::place) moves.insert({action.arg1, action.arg2});
    }
    if (moves.size() > 1) {
        // Keep the response unambiguous: everything after the first completed
        // move is dropped (still counted as generated, never executed).
        std::vector<HighLevelAction> cut;
        for (const auto& action : parsed.plan.actions) {
            cut.push_back(action);
            if (action.verb == HighLevelAction::Verb::place) break;
        }
        parsed.plan.actions = std::move(cut);
    }
    p.plan = parsed.plan;
    p.decision = plan_to_decision(p.plan);
    return p;
}

Plan demonstrator_plan(const PlannerContext& ctx, const PreferenceDataset& prefs,
                       std::uint64_t seed) {
    DemonstratorPlanner planner(&prefs);
    auto proposal = planner.propose(ctx, seed);
    return proposal ? proposal->plan : Plan{};
}

Plan policy_plan(const PlannerContext& ctx, const PolicyParams& params, std::uint64_t seed) {
    PolicyPlanner planner(params);
    auto proposal = planner.propose(ctx, seed);
    return proposal ? proposal->plan : Plan{};
}

Plan baseline_plan(const PlannerContext& ctx, std::uint64_t seed) {
    if (ctx.scene == nullptr) throw ValidationError("planner context requires a scene");
    // Weight vocabulary for the one-off form: object types currently in the
    // belief graph crossed with the scene's receptacle and room types.
    PreferenceDataset vocab;
    for (const auto& room : ctx.graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            for (const auto& obj : node.objects) {
                vocab.entries[parse_object_name(obj).obj_type];
            }
        }
    }
    PolicyPlanner planner(make_baseline_params(*ctx.scene, vocab, seed));
    auto proposal = planner.propose(ctx, seed);
    return proposal ? proposal->plan : Plan{};
}

}  // namespace tidygrid
