#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tidygrid/graph.hpp"
#include "tidygrid/plan.hpp"
#include "tidygrid/sim.hpp"

namespace tidygrid {

struct ExecResult {
    bool executed = false;
    // One of: unknown entity | undiscovered entity | unreachable |
    // precondition failed | receptacle full. Empty when executed.
    std::string reason;
    int low_level_count = 0;
    int rewards_accrued = 0;
};

// Translates high-level actions into low-level sequences and drives the
// simulator, keeping the belief graph in sync after every step. One controller
// per episode.
class Controller {
  public:
    using StepSink = std::function<void(LowLevelAction, const StepResult&)>;

    Controller(Simulator* sim, SceneGraph* graph);

    // Invoked after every committed simulator step (tracing, metrics).
    void set_step_sink(StepSink sink) { sink_ = std::move(sink); }

    ExecResult execute(const HighLevelAction& action);

    // Shortest low-level route (BFS over walkable cells across door links,
    // neighbor order move_forward < turn_left < turn_right) from the agent to
    // any walkable cell 4-adjacent to a target cell; empty if already there.
    // Returns nullopt when unreachable. Pure: does not move the agent.
    std::optional<std::vector<LowLevelAction>> route_adjacent_to(int room, Cell target) const;
    // Same search, but the goal is any cell inside the target room.
    std::optional<std::vector<LowLevelAction>> route_into_room(int room) const;

    // Turns to face an adjacent cell and matches gaze to the tier. Pure.
    std::vector<LowLevelAction> orient_and_gaze(Cell target, Tier tier) const;

  private:
    struct Resolution {
        enum class Kind { room, receptacle, failed };
        Kind kind = Kind::failed;
        int room_index = -1;       // room target
        std::string rec_name;      // receptacle target (also for objects)
        std::string fail_reason;   // when kind == failed
    };

    Resolution resolve_place(const std::string& entity) const;  // rooms/receptacles/objects
    ExecResult fail(const std::string& reason, int steps, int rewards) const;

    // Emits one low-level action: steps the simulator, updates the graph,
    // feeds the sink; accumulates counters.
    StepResult emit(LowLevelAction a, int& steps, int& rewards);
    bool run_route(const std::vector<LowLevelAction>& route, int& steps, int& rewards);
    // Navigate + face + gaze a discovered receptacle; refreshes its belief.
    bool approach(const std::string& rec_name, int& steps, int& rewards, std::string& reason);

    Simulator* sim_;
    SceneGraph* graph_;
    StepSink sink_;
};

}  // namespace tidygrid
