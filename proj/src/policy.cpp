#include "tidygrid/policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "tidygrid/base.hpp"
#include "tidygrid/io.hpp"
#include "tidygrid/names.hpp"

namespace tidygrid {

namespace {

using nlohmann::json;

double lookup(const std::map<PolicyParams::Key, double>& weights, const std::string& a,
              const std::string& b) {
    auto it = weights.find({a, b});
    return it == weights.end() ? 0.0 : it->second;
}

json weights_to_json(const std::map<PolicyParams::Key, double>& weights) {
    json out = json::object();
    for (const auto& [key, w] : weights) out[key.first][key.second] = w;
    return out;
}

std::map<PolicyParams::Key, double> weights_from_json(const json& j, const std::string& what) {
    if (!j.is_object()) throw ParseError(what + " must be an object");
    std::map<PolicyParams::Key, double> out;
    for (const auto& [first, inner] : j.items()) {
        if (!inner.is_object()) throw ParseError(what + "." + first + " must be an object");
        for (const auto& [second, w] : inner.items()) {
            if (!w.is_number()) throw ParseError(what + " weights must be numbers");
            out[{first, second}] = w.get<double>();
        }
    }
    return out;
}

}  // namespace

double PolicyParams::pair_weight(const std::string& obj_type, const std::string& rec_type) const {
    return lookup(pair_weights, obj_type, rec_type);
}

double PolicyParams::room_weight(const std::string& obj_type, const std::string& room_type) const {
    return lookup(room_weights, obj_type, room_type);
}

std::string params_to_json_text(const PolicyParams& params) {
    json j;
    j["version"] = 1;
    j["explore_bias"] = params.explore_bias;
    j["temperature"] = params.temperature;
    j["pair_weights"] = weights_to_json(params.pair_weights);
    j["room_weights"] = weights_to_json(params.room_weights);
    return j.dump(2) + "\n";
}

PolicyParams params_from_json_text(const std::string& text) {
    json j = parse_json_text(text, "policy params");
    if (!j.is_object()) throw ParseError("policy params must be a JSON object");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1) {
        throw ParseError("policy params: unsupported or missing version");
    }
    PolicyParams params;
    if (!j.contains("explore_bias") || !j["explore_bias"].is_number()) {
        throw ParseError("policy params: missing explore_bias");
    }
    if (!j.contains("temperature") || !j["temperature"].is_number()) {
        throw ParseError("policy params: missing temperature");
    }
    params.explore_bias = j["explore_bias"].get<double>();
    params.temperature = j["temperature"].get<double>();
    if (j.contains("pair_weights")) {
        params.pair_weights = weights_from_json(j["pair_weights"], "pair_weights");
    }
    if (j.contains("room_weights")) {
        params.room_weights = weights_from_json(j["room_weights"], "room_weights");
    }
    return params;
}

void save_params(const PolicyParams& params, const std::string& path) {
    write_file(path, params_to_json_text(params));
}

PolicyParams load_params(const std::string& path) {
    return params_from_json_text(read_file(path));
}

std::string decision_to_json_text(const PlanDecision& decision) {
    json j;
    if (decision.kind == PlanDecision::Kind::explore) {
        j["kind"] = "explore";
        j["rooms"] = decision.rooms;
    } else {
        j["kind"] = "rearrange";
        j["object"] = decision.object;
        j["receptacle"] = decision.receptacle;
    }
    return j.dump();
}

PlanDecision decision_from_json_text(const std::string& text) {
    json j = parse_json_text(text, "plan decision");
    if (!j.is_object() || !j.contains("kind")) throw ParseError("plan decision: missing kind");
    PlanDecision decision;
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "explore") {
        decision.kind = PlanDecision::Kind::explore;
        if (j.contains("rooms")) decision.rooms = j["rooms"].get<std::vector<std::string>>();
    } else if (kind == "rearrange") {
        decision.kind = PlanDecision::Kind::rearrange;
        if (!j.contains("object") || !j.contains("receptacle")) {
            throw ParseError("plan decision: rearrange requires object and receptacle");
        }
        decision.object = j["object"].get<std::string>();
        decision.receptacle = j["receptacle"].get<std::string>();
    } else {
        throw ParseError("plan decision: unknown kind '" + kind + "'");
    }
    return decision;
}

PlannerContext make_context(const SceneGraph& graph, const Scene& scene, int iteration) {
    PlannerContext ctx;
    ctx.graph = graph;
    ctx.held = graph.held;
    ctx.prompt = render_prompt(graph).rendered;
    ctx.iteration = iteration;
    ctx.scene = &scene;
    return ctx;
}

std::vector<Candidate> build_candidates(const PlannerContext& ctx) {
    if (ctx.scene == nullptr) throw ValidationError("planner context requires a scene");
    const SceneGraph& graph = ctx.graph;

    std::vector<Candidate> out;
    out.push_back(Candidate{});  // the explore option, always first

    // Discovered receptacles in deterministic graph order, with believed load.
    struct Target {
        std::string name;
        std::string rec_type;
        std::string room_type;
        int believed_load = 0;
        int capacity = 0;
    };
    std::vector<Target> targets;
    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            const ReceptacleName parsed = parse_receptacle_name(rec_name);
            RecRef ref = ctx.scene->find_receptacle(rec_name);
            if (!ref.valid()) {
                throw ValidationError("belief graph names a receptacle absent from the scene: " +
                                      rec_name);
            }
            targets.push_back(Target{rec_name, parsed.rec_type, parsed.room.room_type,
                                     static_cast<int>(node.objects.size()),
                                     ctx.scene->receptacle(ref).capacity});
        }
    }

    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            for (const auto& obj : node.objects) {
                if (ctx.held && *ctx.held == obj) continue;
                const ObjectName obj_name = parse_object_name(obj);
                for (const auto& target : targets) {
                    if (target.name == rec_name) continue;
                    if (target.believed_load >= target.capacity) continue;
                    Candidate cand;
                    cand.kind = PlanDecision::Kind::rearrange;
                    cand.object = obj;
                    cand.receptacle = target.name;
                    cand.obj_type = obj_name.obj_type;
                    cand.rec_type = target.rec_type;
                    cand.room_type = target.room_type;
                    out.push_back(std::move(cand));
                }
            }
        }
    }
    return out;
}

double candidate_score(const Candidate& cand, const PolicyParams& params,
                       double unvisited_fraction) {
    if (cand.kind == PlanDecision::Kind::explore) {
        return params.explore_bias + 2.0 * unvisited_fraction;
    }
    return params.pair_weight(cand.obj_type, cand.rec_type) +
           params.room_weight(cand.obj_type, cand.room_type);
}

std::vector<double> candidate_probabilities(const std::vector<Candidate>& candidates,
                                            const PolicyParams& params,
                                            double unvisited_fraction) {
    if (candidates.empty()) throw ValidationError("cannot score an empty candidate set");
    if (!(params.temperature > 0.0)) throw ValidationError("temperature must be positive");
    std::vector<double> z(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        z[i] = candidate_score(candidates[i], params, unvisited_fraction) / params.temperature;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        total += v;
    }
    for (double& v : z) v /= total;
    return z;
}

std::size_t sample_candidate(const std::vector<Candidate>& candidates,
                             const PolicyParams& params, double unvisited_fraction,
                             std::mt19937_64& rng) {
    const std::vector<double> probs =
        candidate_probabilities(candidates, params, unvisited_fraction);
    const double u = uniform_double(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return probs.size() - 1;  // guard against rounding shortfall
}

std::pair<Plan, PlanDecision> render_decision_plan(const PlanDecision& decision,
                                                   const SceneGraph& graph) {
    Plan plan;
    PlanDecision filled = decision;

    if (decision.kind == PlanDecision::Kind::rearrange) {
        const std::string holder = graph.object_location(decision.object);
        if (holder.empty()) {
            throw ValidationError("cannot plan a move for an undiscovered object: " +
                                  decision.object);
        }
        using V = HighLevelAction::Verb;
        plan.actions = {
            {V::go_to, decision.object, ""},
            {V::look_at, holder, ""},
            {V::pick_up, decision.object, ""},
            {V::go_to, decision.receptacle, ""},
            {V::look_at, decision.receptacle, ""},
            {V::place, decision.object, decision.receptacle},
        };
        plan.source_text = render_plan(plan);
        return {plan, filled};
    }

    filled.rooms.clear();
    auto add_room = [&filled](const std::string& room) {
        if (std::find(filled.rooms.begin(), filled.rooms.end(), room) == filled.rooms.end()) {
            filled.rooms.push_back(room);
        }
    };

    std::vector<std::string> unvisited;
    for (const auto& room : graph.rooms) {
        if (!room.visited) unvisited.push_back(room.name);
    }
    if (!unvisited.empty()) {
        for (const auto& room : unvisited) {
            plan.actions.push_back({HighLevelAction::Verb::go_to, room, ""});
            add_room(room);
        }
        plan.source_text = render_plan(plan);
        return {plan, filled};
    }

    // Everything visited: survey up to five receptacles whose contents are
    // still unknown (a go-and-look pair each; ten actions total).
    int surveys = 0;
    for (const auto& room : graph.rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            if (node.contents_known || surveys >= kMaxPlanLength / 2) continue;
            plan.actions.push_back({HighLevelAction::Verb::go_to, rec_name, ""});
            plan.actions.push_back({HighLevelAction::Verb::look_at, rec_name, ""});
            add_room(room.name);
            ++surveys;
        }
    }
    if (!plan.actions.empty()) {
        plan.source_text = render_plan(plan);
        return {plan, filled};
    }

    // Fully mapped world: sweep every room again.
    for (const auto& room : graph.rooms) {
        if (plan.actions.size() >= static_cast<std::size_t>(kMaxPlanLength)) break;
        plan.actions.push_back({HighLevelAction::Verb::go_to, room.name, ""});
        add_room(room.name);
    }
    plan.source_text = render_plan(plan);
    return {plan, filled};
}

PlanDecision plan_to_decision(const Plan& plan) {
    std::set<std::pair<std::string, std::string>> moves;
    for (const auto& action : plan.actions) {
        if (action.verb == HighLevelAction::Verb::place) moves.insert({action.arg1, action.arg2});
    }
    if (moves.size() > 1) throw ValidationError("ambiguous multi-move plan");

    PlanDecision decision;
    if (moves.size() == 1) {
        decision.kind = PlanDecision::Kind::rearrange;
        decision.object = moves.begin()->first;
        decision.receptacle = moves.begin()->second;
        return decision;
    }
    decision.kind = PlanDecision::Kind::explore;
    for (const auto& action : plan.actions) {
        if (action.verb != HighLevelAction::Verb::go_to) continue;
        // Receptacle-shaped targets are surveys, not room visits.
        if (try_parse_receptacle_name(action.arg1)) continue;
        if (!try_parse_room_name(action.arg1)) continue;
        if (std::find(decision.rooms.begin(), decision.rooms.end(), action.arg1) ==
            decision.rooms.end()) {
            decision.rooms.push_back(action.arg1);
        }
    }
    return decision;
}

// --- likelihood fitting -----------------------------------------------------

namespace {

// The per-record structure the likelihood actually depends on: one feature
// key pair per candidate plus the index of the recorded choice.
struct CandFeat {
    bool is_explore = false;
    PolicyParams::Key pair_key;
    PolicyParams::Key room_key;
};

struct RecordFeat {
    std::vector<CandFeat> cands;
    double explore_extra = 0.0;  // 2 * unvisited fraction at decision time
    std::size_t chosen = 0;
};

RecordFeat featurize(const PlannerContext& ctx, const PlanDecision& decision) {
    const std::vector<Candidate> candidates = build_candidates(ctx);
    RecordFeat feat;
    feat.explore_extra = 2.0 * ctx.graph.unvisited_fraction();
    feat.cands.reserve(candidates.size());
    std::size_t chosen = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& cand = candidates[i];
        CandFeat cf;
        cf.is_explore = cand.kind == PlanDecision::Kind::explore;
        cf.pair_key = {cand.obj_type, cand.rec_type};
        cf.room_key = {cand.obj_type, cand.room_type};
        feat.cands.push_back(std::move(cf));
        if (decision.kind == PlanDecision::Kind::explore) {
            if (cand.kind == PlanDecision::Kind::explore) chosen = i;
        } else if (cand.kind == PlanDecision::Kind::rearrange && cand.object == decision.object &&
                   cand.receptacle == decision.receptacle) {
            chosen = i;
        }
    }
    if (chosen == candidates.size()) {
        throw ValidationError("recorded decision is not a candidate in its context: " +
                              decision_to_json_text(decision));
    }
    feat.chosen = chosen;
    return feat;
}

std::vector<RecordFeat> featurize_all(const DecisionDataset& dataset) {
    std::vector<RecordFeat> out;
    out.reserve(dataset.size());
    for (const auto& [ctx, decision] : dataset) out.push_back(featurize(ctx, decision));
    return out;
}

double cand_score(const CandFeat& cf, const RecordFeat& rec, const PolicyParams& params) {
    if (cf.is_explore) return params.explore_bias + rec.explore_extra;
    return lookup(params.pair_weights, cf.pair_key.first, cf.pair_key.second) +
           lookup(params.room_weights, cf.room_key.first, cf.room_key.second);
}

// Softmax probabilities over one record's candidates, plus that record's nll.
std::pair<std::vector<double>, double> record_probs(const RecordFeat& rec,
                                                    const PolicyParams& params) {
    std::vector<double> z(rec.cands.size());
    for (std::size_t i = 0; i < rec.cands.size(); ++i) {
        z[i] = cand_score(rec.cands[i], rec, params) / params.temperature;
    }
    const double m = *std::max_element(z.begin(), z.end());
    const double z_chosen = z[rec.chosen];
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        total += v;
    }
    const double nll = m + std::log(total) - z_chosen;
    for (double& v : z) v /= total;
    return {std::move(z), nll};
}

double nll_of(const std::vector<RecordFeat>& records, const PolicyParams& params) {
    double total = 0.0;
    for (const auto& rec : records) total += record_probs(rec, params).second;
    return total;
}

double l2_norm_sq(const PolicyParams& params) {
    double total = params.explore_bias * params.explore_bias;
    for (const auto& [key, w] : params.pair_weights) total += w * w;
    for (const auto& [key, w] : params.room_weights) total += w * w;
    return total;
}

}  // namespace

double policy_nll(const DecisionDataset& dataset, const PolicyParams& params) {
    if (!(params.temperature > 0.0)) throw ValidationError("temperature must be positive");
    return nll_of(featurize_all(dataset), params);
}

PolicyGradient policy_nll_gradient(const DecisionDataset& dataset, const PolicyParams& params) {
    if (!(params.temperature > 0.0)) throw ValidationError("temperature must be positive");
    PolicyGradient grad;
    const double inv_t = 1.0 / params.temperature;
    for (const auto& rec : featurize_all(dataset)) {
        const auto [probs, nll] = record_probs(rec, params);
        (void)nll;
        for (std::size_t i = 0; i < rec.cands.size(); ++i) {
            const double g = (probs[i] - (i == rec.chosen ? 1.0 : 0.0)) * inv_t;
            if (rec.cands[i].is_explore) {
                grad.explore_bias += g;
            } else {
                grad.pair_weights[rec.cands[i].pair_key] += g;
                grad.room_weights[rec.cands[i].room_key] += g;
            }
        }
    }
    return grad;
}

FitResult policy_fit(const DecisionDataset& dataset, const PolicyParams& init, double lr,
                     int epochs, double l2) {
    if (!(init.temperature > 0.0)) throw ValidationError("temperature must be positive");
    if (lr <= 0.0) throw ValidationError("learning rate must be positive");
    if (epochs < 0) throw ValidationError("epochs must be non-negative");

    const std::vector<RecordFeat> records = featurize_all(dataset);
    FitResult result;
    result.params = init;
    PolicyParams& params = result.params;
    const double inv_t = 1.0 / params.temperature;

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto rng = make_rng(mix_seed(0x5eedf17u, "policy-fit-shuffle"));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const RecordFeat& rec = records[idx];
            const auto [probs, nll] = record_probs(rec, params);
            (void)nll;
            for (std::size_t i = 0; i < rec.cands.size(); ++i) {
                const double g = (probs[i] - (i == rec.chosen ? 1.0 : 0.0)) * inv_t;
                if (g == 0.0) continue;
                if (rec.cands[i].is_explore) {
                    params.explore_bias -= lr * g;
                } else {
                    params.pair_weights[rec.cands[i].pair_key] -= lr * g;
                    params.room_weights[rec.cands[i].room_key] -= lr * g;
                }
            }
        }
        // One ridge-decay step per pass keeps the penalty's pull at the same
        // scale as distributing it across records.
        const double decay = 1.0 - 2.0 * lr * l2;
        params.explore_bias *= decay;
        for (auto& [key, w] : params.pair_weights) w *= decay;
        for (auto& [key, w] : params.room_weights) w *= decay;

        const double loss = nll_of(records, params) + l2 * l2_norm_sq(params);
        if (!std::isfinite(loss)) {
            throw ValidationError("policy_fit diverged: non-finite loss at epoch " +
                                  std::to_string(epoch));
        }
        result.loss_trace.push_back(loss);
    }
    return result;
}

PolicyParams make_baseline_params(const Scene& scene, const PreferenceDataset& prefs,
                                  std::uint64_t seed) {
    std::set<std::string> rec_types;
    std::set<std::string> room_types;
    for (const auto& room : scene.rooms) {
        room_types.insert(room.room_type);
        for (const auto& rec : room.receptacles) rec_types.insert(rec.rec_type);
    }

    PolicyParams params;
    auto rng = make_rng(mix_seed(seed, "baseline-params"));
    auto draw = [&rng]() { return uniform_double(rng) * 0.2 - 0.1; };
    for (const auto& [obj_type, pairs] : prefs.entries) {
        (void)pairs;
        for (const auto& rec_type : rec_types) params.pair_weights[{obj_type, rec_type}] = draw();
        for (const auto& room_type : room_types) {
            params.room_weights[{obj_type, room_type}] = draw();
        }
    }
    params.explore_bias = draw();
    return params;
}

}  // namespace tidygrid
