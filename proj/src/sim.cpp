#include "tidygrid/sim.hpp"

#include <algorithm>

namespace tidygrid {

std::string to_string(LowLevelAction a) {
    switch (a) {
        case LowLevelAction::move_forward: return "move_forward";
        case LowLevelAction::turn_left: return "turn_left";
        case LowLevelAction::turn_right: return "turn_right";
        case LowLevelAction::look_up: return "look_up";
        case LowLevelAction::look_down: return "look_down";
        case LowLevelAction::grab_release: return "grab_release";
    }
    return "?";
}

LowLevelAction low_level_action_from_string(const std::string& s) {
    if (s == "move_forward") return LowLevelAction::move_forward;
    if (s == "turn_left") return LowLevelAction::turn_left;
    if (s == "turn_right") return LowLevelAction::turn_right;
    if (s == "look_up") return LowLevelAction::look_up;
    if (s == "look_down") return LowLevelAction::look_down;
    if (s == "grab_release") return LowLevelAction::grab_release;
    throw ParseError("invalid low-level action '" + s + "'");
}

Simulator::Simulator(const Scene* scene, const PreferenceDataset* prefs, int horizon)
    : scene_(scene), prefs_(prefs), horizon_(horizon) {
    if (horizon_ < 1) throw ValidationError("horizon must be >= 1");
}

Observation Simulator::reset(const TaskSpec& task, std::uint64_t /*seed*/) {
    if (task.scene_id != scene_->scene_id) {
        throw ValidationError("task '" + task.task_id + "' targets scene '" + task.scene_id +
                              "', simulator holds '" + scene_->scene_id + "'");
    }
    state_ = WorldState{};
    grab_target_.reset();
    for (const std::string& rec : scene_->receptacle_names()) state_.placements[rec] = {};
    std::set<std::string> seen;
    for (const auto& [obj, rec] : task.placements) {
        RecRef ref = scene_->find_receptacle(rec);
        if (!ref.valid()) {
            throw ValidationError("task places '" + obj.name() + "' on unknown receptacle '" +
                                  rec + "'");
        }
        if (!seen.insert(obj.name()).second) {
            throw ValidationError("duplicate object '" + obj.name() + "' in task");
        }
        auto& list = state_.placements[rec];
        if (static_cast<int>(list.size()) >= scene_->receptacle(ref).capacity) {
            throw ValidationError("task overfills receptacle '" + rec + "'");
        }
        list.push_back(obj.name());
    }
    state_.pose.room = 0;
    state_.pose.cell = *scene_->rooms.front().walkable.begin();
    state_.pose.heading = Heading::north;
    state_.pose.gaze = Gaze::level;
    state_.t = 0;
    return observe();
}

std::optional<RecRef> Simulator::reach_target() const {
    const Room& room = scene_->rooms[static_cast<std::size_t>(state_.pose.room)];
    Cell v = heading_vec(state_.pose.heading);
    for (int dist = 1; dist <= 2; ++dist) {
        Cell c{state_.pose.cell.x + v.x * dist, state_.pose.cell.y + v.y * dist};
        for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
            if (room.receptacles[i].cell == c) {
                return RecRef{state_.pose.room, static_cast<int>(i)};
            }
        }
    }
    return std::nullopt;
}

StepResult Simulator::step(LowLevelAction action) {
    if (done()) throw HorizonExhausted("step on a finished episode (t = horizon)");

    int reward = 0;
    std::optional<Event> event;
    AgentPose& pose = state_.pose;

    switch (action) {
        case LowLevelAction::move_forward: {
            auto dest = scene_->move_dest(pose.room, pose.cell, pose.heading);
            if (dest) {
                pose.room = dest->first;
                pose.cell = dest->second;
            } else {
                event = Event{Event::Kind::noop, "", "", "blocked"};
            }
            break;
        }
        case LowLevelAction::turn_left:
            pose.heading = turned_left(pose.heading);
            break;
        case LowLevelAction::turn_right:
            pose.heading = turned_right(pose.heading);
            break;
        case LowLevelAction::look_up:
            if (pose.gaze == Gaze::down) {
                pose.gaze = Gaze::level;
            } else if (pose.gaze == Gaze::level) {
                pose.gaze = Gaze::up;
            } else {
                event = Event{Event::Kind::noop, "", "", "gaze limit"};
            }
            break;
        case LowLevelAction::look_down:
            if (pose.gaze == Gaze::up) {
                pose.gaze = Gaze::level;
            } else if (pose.gaze == Gaze::level) {
                pose.gaze = Gaze::down;
            } else {
                event = Event{Event::Kind::noop, "", "", "gaze limit"};
            }
            break;
        case LowLevelAction::grab_release: {
            auto target = reach_target();
            auto declared = grab_target_;
            grab_target_.reset();  // one-shot regardless of outcome
            if (!target) {
                event = Event{Event::Kind::noop, "", "", "no receptacle in reach"};
                break;
            }
            const Receptacle& rec = scene_->receptacle(*target);
            std::string rec_name = scene_->receptacle_display(*target);
            if (pose.gaze != gaze_for_tier(rec.tier)) {
                event = Event{Event::Kind::noop, "", "", "gaze mismatch"};
                break;
            }
            auto& list = state_.placements[rec_name];
            if (state_.held) {
                if (static_cast<int>(list.size()) >= rec.capacity) {
                    event = Event{Event::Kind::noop, "", "", "receptacle full"};
                    break;
                }
                std::string obj = *state_.held;
                list.push_back(obj);
                state_.held.reset();
                if (is_correct_placement(obj, rec_name, *scene_, *prefs_)) reward = 1;
                event = Event{Event::Kind::placed, obj, rec_name, ""};
            } else {
                if (list.empty()) {
                    event = Event{Event::Kind::noop, "", "", "receptacle empty"};
                    break;
                }
                auto it = list.begin();
                if (declared) {
                    auto found = std::find(list.begin(), list.end(), *declared);
                    if (found != list.end()) it = found;
                }
                std::string obj = *it;
                if (is_correct_placement(obj, rec_name, *scene_, *prefs_)) reward = -1;
                list.erase(it);
                state_.held = obj;
                event = Event{Event::Kind::grabbed, obj, rec_name, ""};
            }
            break;
        }
    }

    ++state_.t;
    return StepResult{observe(), reward, event, done()};
}

Observation Simulator::observe() const {
    const AgentPose& pose = state_.pose;
    const Room& room = scene_->rooms[static_cast<std::size_t>(pose.room)];
    Observation obs;
    obs.pose = pose;
    obs.held = state_.held;
    obs.t = state_.t;
    for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
        const Receptacle& rec = room.receptacles[i];
        int dx = rec.cell.x - pose.cell.x;
        int dy = rec.cell.y - pose.cell.y;
        if (std::max(std::abs(dx), std::abs(dy)) > 5) continue;
        bool in_cone = false;
        switch (pose.heading) {
            case Heading::north: in_cone = dy <= 0 && std::abs(dx) <= -dy; break;
            case Heading::south: in_cone = dy >= 0 && std::abs(dx) <= dy; break;
            case Heading::east: in_cone = dx >= 0 && std::abs(dy) <= dx; break;
            case Heading::west: in_cone = dx <= 0 && std::abs(dy) <= -dx; break;
        }
        if (!in_cone) continue;
        ObsEntry entry;
        entry.receptacle = room.receptacle_name(static_cast<int>(i));
        entry.contents_known = pose.gaze == gaze_for_tier(rec.tier);
        if (entry.contents_known) {
            auto it = state_.placements.find(entry.receptacle);
            if (it != state_.placements.end()) entry.objects = it->second;
        }
        obs.observed.push_back(std::move(entry));
    }
    return obs;
}

void Simulator::set_grab_target(const std::string& obj_name) {
    grab_target_ = obj_name;
}

}  // namespace tidygrid
