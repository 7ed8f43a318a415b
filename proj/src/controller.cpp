#include "tidygrid/controller.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

namespace tidygrid {

namespace {

struct Node {
    int room;
    Cell cell;
    Heading heading;

    friend auto operator<=>(const Node& a, const Node& b) {
        return std::tie(a.room, a.cell, a.heading) <=> std::tie(b.room, b.cell, b.heading);
    }
    friend bool operator==(const Node& a, const Node& b) {
        return std::tie(a.room, a.cell, a.heading) == std::tie(b.room, b.cell, b.heading);
    }
};

std::optional<std::vector<LowLevelAction>> route_search(
    const Scene& scene, const AgentPose& start,
    const std::function<bool(int, Cell)>& is_goal) {
    Node init{start.room, start.cell, start.heading};
    if (is_goal(init.room, init.cell)) return std::vector<LowLevelAction>{};

    std::map<Node, std::pair<Node, LowLevelAction>> parent;
    std::queue<Node> frontier;
    parent.emplace(init, std::make_pair(init, LowLevelAction::move_forward));
    frontier.push(init);

    while (!frontier.empty()) {
        Node cur = frontier.front();
        frontier.pop();

        // Expansion order fixes the tie-break: move_forward < turn_left < turn_right.
        std::vector<std::pair<Node, LowLevelAction>> next;
        if (auto dest = scene.move_dest(cur.room, cur.cell, cur.heading)) {
            next.push_back({{dest->first, dest->second, cur.heading}, LowLevelAction::move_forward});
        }
        next.push_back({{cur.room, cur.cell, turned_left(cur.heading)}, LowLevelAction::turn_left});
        next.push_back({{cur.room, cur.cell, turned_right(cur.heading)}, LowLevelAction::turn_right});

        for (const auto& [node, action] : next) {
            if (parent.count(node)) continue;
            parent.emplace(node, std::make_pair(cur, action));
            if (is_goal(node.room, node.cell)) {
                std::vector<LowLevelAction> route;
                Node walk = node;
                while (!(walk == init)) {
                    auto& [prev, act] = parent.at(walk);
                    route.push_back(act);
                    walk = prev;
                }
                std::reverse(route.begin(), route.end());
                return route;
            }
            frontier.push(node);
        }
    }
    return std::nullopt;
}

}  // namespace

Controller::Controller(Simulator* sim, SceneGraph* graph) : sim_(sim), graph_(graph) {}

std::optional<std::vector<LowLevelAction>> Controller::route_adjacent_to(int room,
                                                                         Cell target) const {
    const Scene& scene = sim_->scene();
    const Room& r = scene.rooms[static_cast<std::size_t>(room)];
    std::set<Cell> goals;
    for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
        Cell v = heading_vec(h);
        Cell c{target.x + v.x, target.y + v.y};
        if (r.is_walkable(c)) goals.insert(c);
    }
    if (goals.empty()) return std::nullopt;
    return route_search(scene, sim_->state().pose, [&](int node_room, Cell cell) {
        return node_room == room && goals.count(cell) > 0;
    });
}

std::optional<std::vector<LowLevelAction>> Controller::route_into_room(int room) const {
    return route_search(sim_->scene(), sim_->state().pose,
                        [&](int node_room, Cell) { return node_room == room; });
}

std::vector<LowLevelAction> Controller::orient_and_gaze(Cell target, Tier tier) const {
    const AgentPose& pose = sim_->state().pose;
    int dx = target.x - pose.cell.x;
    int dy = target.y - pose.cell.y;
    if (std::abs(dx) + std::abs(dy) != 1) {
        throw ValidationError("orient_and_gaze requires a 4-adjacent target");
    }
    Heading want = dx == 1 ? Heading::east
                 : dx == -1 ? Heading::west
                 : dy == 1 ? Heading::south
                            : Heading::north;

    std::vector<LowLevelAction> out;
    if (want != pose.heading) {
        if (turned_left(pose.heading) == want) {
            out.push_back(LowLevelAction::turn_left);
        } else if (turned_right(pose.heading) == want) {
            out.push_back(LowLevelAction::turn_right);
        } else {
            out.push_back(LowLevelAction::turn_left);
            out.push_back(LowLevelAction::turn_left);
        }
    }
    int have = static_cast<int>(pose.gaze);
    int need = static_cast<int>(gaze_for_tier(tier));
    while (have < need) {
        out.push_back(LowLevelAction::look_up);
        ++have;
    }
    while (have > need) {
        out.push_back(LowLevelAction::look_down);
        --have;
    }
    return out;
}

StepResult Controller::emit(LowLevelAction a, int& steps, int& rewards) {
    StepResult result = sim_->step(a);
    const Scene& scene = sim_->scene();
    update_graph(*graph_, result.observation,
                 scene.rooms[static_cast<std::size_t>(result.observation.pose.room)].name());
    ++steps;
    rewards += result.reward;
    if (sink_) sink_(a, result);
    return result;
}

bool Controller::run_route(const std::vector<LowLevelAction>& route, int& steps, int& rewards) {
    for (LowLevelAction a : route) emit(a, steps, rewards);
    return true;
}

Controller::Resolution Controller::resolve_place(const std::string& entity) const {
    Resolution res;
    int room = graph_->find_room(entity);
    if (room >= 0) {
        res.kind = Resolution::Kind::room;
        res.room_index = room;
        return res;
    }
    if (graph_->has_receptacle(entity)) {
        res.kind = Resolution::Kind::receptacle;
        res.rec_name = entity;
        return res;
    }
    std::string holder = graph_->object_location(entity);
    if (!holder.empty()) {
        res.kind = Resolution::Kind::receptacle;
        res.rec_name = holder;
        return res;
    }
    res.kind = Resolution::Kind::failed;
    bool well_formed = try_parse_object_name(entity) || try_parse_room_name(entity) ||
                       try_parse_receptacle_name(entity);
    res.fail_reason = well_formed ? "undiscovered entity" : "unknown entity";
    return res;
}

ExecResult Controller::fail(const std::string& reason, int steps, int rewards) const {
    return ExecResult{false, reason, steps, rewards};
}

bool Controller::approach(const std::string& rec_name, int& steps, int& rewards,
                          std::string& reason) {
    RecRef ref = sim_->scene().find_receptacle(rec_name);
    if (!ref.valid()) {
        reason = "unknown entity";
        return false;
    }
    const Receptacle& rec = sim_->scene().receptacle(ref);
    auto route = route_adjacent_to(ref.room, rec.cell);
    if (!route) {
        reason = "unreachable";
        return false;
    }
    run_route(*route, steps, rewards);
    run_route(orient_and_gaze(rec.cell, rec.tier), steps, rewards);
    return true;
}

ExecResult Controller::execute(const HighLevelAction& action) {
    int steps = 0;
    int rewards = 0;

    switch (action.verb) {
        case HighLevelAction::Verb::go_to: {
            Resolution res = resolve_place(action.arg1);
            if (res.kind == Resolution::Kind::failed) return fail(res.fail_reason, steps, rewards);
            if (res.kind == Resolution::Kind::room) {
                auto route = route_into_room(res.room_index);
                if (!route) return fail("unreachable", steps, rewards);
                run_route(*route, steps, rewards);
                // Full spin: with sight radius covering a room, entering plus
                // looking around discovers every receptacle in it.
                for (int i = 0; i < 4; ++i) emit(LowLevelAction::turn_left, steps, rewards);
                return ExecResult{true, "", steps, rewards};
            }
            RecRef ref = sim_->scene().find_receptacle(res.rec_name);
            if (!ref.valid()) return fail("unknown entity", steps, rewards);
            auto route = route_adjacent_to(ref.room, sim_->scene().receptacle(ref).cell);
            if (!route) return fail("unreachable", steps, rewards);
            run_route(*route, steps, rewards);
            return ExecResult{true, "", steps, rewards};
        }

        case HighLevelAction::Verb::look_at: {
            Resolution res = resolve_place(action.arg1);
            if (res.kind == Resolution::Kind::failed) return fail(res.fail_reason, steps, rewards);
            if (res.kind == Resolution::Kind::room) {
                return fail("precondition failed", steps, rewards);  // look at needs obj/rec
            }
            std::string reason;
            if (!approach(res.rec_name, steps, rewards, reason)) {
                return fail(reason, steps, rewards);
            }
            return ExecResult{true, "", steps, rewards};
        }

        case HighLevelAction::Verb::pick_up: {
            if (sim_->state().held) return fail("precondition failed", steps, rewards);
            std::string holder = graph_->object_location(action.arg1);
            if (holder.empty()) {
                bool well_formed = try_parse_object_name(action.arg1).has_value();
                return fail(well_formed ? "undiscovered entity" : "unknown entity", steps,
                            rewards);
            }
            std::string reason;
            if (!approach(holder, steps, rewards, reason)) return fail(reason, steps, rewards);
            // The look refreshed this receptacle's belief from ground truth.
            std::string now = graph_->object_location(action.arg1);
            if (now != holder) return fail("precondition failed", steps, rewards);
            sim_->set_grab_target(action.arg1);
            emit(LowLevelAction::grab_release, steps, rewards);
            if (!sim_->state().held || *sim_->state().held != action.arg1) {
                return fail("precondition failed", steps, rewards);
            }
            return ExecResult{true, "", steps, rewards};
        }

        case HighLevelAction::Verb::place: {
            if (!sim_->state().held || *sim_->state().held != action.arg1) {
                return fail("precondition failed", steps, rewards);
            }
            if (!graph_->has_receptacle(action.arg2)) {
                bool well_formed = try_parse_receptacle_name(action.arg2).has_value();
                return fail(well_formed ? "undiscovered entity" : "unknown entity", steps,
                            rewards);
            }
            std::string reason;
            if (!approach(action.arg2, steps, rewards, reason)) {
                return fail(reason, steps, rewards);
            }
            StepResult result = emit(LowLevelAction::grab_release, steps, rewards);
            if (result.event && result.event->kind == Event::Kind::placed) {
                return ExecResult{true, "", steps, rewards};
            }
            std::string why = result.event ? result.event->reason : "precondition failed";
            if (why != "receptacle full") why = "precondition failed";
            return fail(why, steps, rewards);
        }
    }
    return fail("precondition failed", steps, rewards);
}

}  // namespace tidygrid
