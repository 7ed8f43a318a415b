#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tidygrid/world.hpp"

namespace tidygrid {

enum class LowLevelAction { move_forward, turn_left, turn_right, look_up, look_down, grab_release };

std::string to_string(LowLevelAction a);
LowLevelAction low_level_action_from_string(const std::string& s);

struct ObsEntry {
    std::string receptacle;
    bool contents_known = false;
    std::vector<std::string> objects;  // meaningful only when contents_known
};

struct Observation {
    std::vector<ObsEntry> observed;
    AgentPose pose;
    std::optional<std::string> held;
    int t = 0;
};

struct Event {
    enum class Kind { grabbed, placed, noop };
    Kind kind = Kind::noop;
    std::string object;      // grabbed/placed
    std::string receptacle;  // grabbed/placed
    std::string reason;      // noop
};

struct StepResult {
    Observation observation;
    int reward = 0;
    std::optional<Event> event;
    bool done = false;
};

// Executes low-level actions against one WorldState. Copyable, so an episode
// can be dry-run on a clone before committing steps against the horizon.
class Simulator {
  public:
    Simulator(const Scene* scene, const PreferenceDataset* prefs, int horizon = 1000);

    // Places objects per the task and puts the agent on the first walkable
    // cell (lowest (x, y)) of the first room, heading N, gaze level, t = 0.
    // The seed is accepted for interface stability; the start state is fully
    // deterministic and does not consume randomness.
    Observation reset(const TaskSpec& task, std::uint64_t seed = 0);

    StepResult step(LowLevelAction action);
    Observation observe() const;

    // Declares which object the next grab should take from the target
    // receptacle. One-shot: consumed (or dropped) by the next grab_release.
    void set_grab_target(const std::string& obj_name);

    const WorldState& state() const { return state_; }
    const Scene& scene() const { return *scene_; }
    int horizon() const { return horizon_; }
    bool done() const { return state_.t >= horizon_; }

    // Receptacle the next grab_release would address: the nearest receptacle
    // cell one or two cells straight ahead in the current room.
    std::optional<RecRef> reach_target() const;

  private:
    const Scene* scene_;
    const PreferenceDataset* prefs_;
    int horizon_;
    WorldState state_;
    std::optional<std::string> grab_target_;
};

}  // namespace tidygrid
