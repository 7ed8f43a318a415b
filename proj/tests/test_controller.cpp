#include <doctest.h>

#include <array>
#include <cstdlib>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tidygrid/controller.hpp"
#include "tidygrid/graph.hpp"
#include "tidygrid/sim.hpp"
#include "tidygrid/world.hpp"

using namespace tidygrid;

namespace {

// Two 5x5 rooms joined by a door. Every receptacle is within sight radius of
// every cell in its room, so a full spin reveals a whole room.
Scene duplex_scene() {
    Scene scene;
    scene.scene_id = "duplex";

    Room kitchen;
    kitchen.room_type = "kitchen";
    kitchen.room_index = 0;
    kitchen.width = 5;
    kitchen.height = 5;
    for (int x = 0; x < 5; ++x) {
        for (int y = 0; y < 5; ++y) kitchen.walkable.insert({x, y});
    }
    kitchen.receptacles = {Receptacle{"counter", 0, {4, 0}, Tier::mid, 4},
                           Receptacle{"hamper", 0, {0, 4}, Tier::low, 4}};
    for (const auto& rec : kitchen.receptacles) kitchen.walkable.erase(rec.cell);
    kitchen.doors = {Door{"lobby 0", {4, 2}}};

    Room lobby;
    lobby.room_type = "lobby";
    lobby.room_index = 0;
    lobby.width = 5;
    lobby.height = 5;
    for (int x = 0; x < 5; ++x) {
        for (int y = 0; y < 5; ++y) lobby.walkable.insert({x, y});
    }
    lobby.receptacles = {Receptacle{"shelf", 0, {4, 4}, Tier::high, 1}};
    lobby.walkable.erase({4, 4});
    lobby.doors = {Door{"kitchen 0", {0, 2}}};

    scene.rooms = {kitchen, lobby};
    scene.validate();
    return scene;
}

PreferenceDataset duplex_prefs() {
    PreferenceDataset prefs;
    prefs.entries["pan"] = {{"kitchen", "counter"}};
    prefs.entries["towel"] = {{"kitchen", "hamper"}};
    prefs.entries["mug"] = {{"lobby", "shelf"}};
    return prefs;
}

TaskSpec duplex_task() {
    TaskSpec task;
    task.task_id = "duplex-task";
    task.scene_id = "duplex";
    task.placements = {
        {{"mug", 0}, "lobby 0 shelf 0"},       // correct; fills the capacity-1 shelf
        {{"mug", 1}, "kitchen 0 counter 0"},   // misplaced
        {{"towel", 0}, "kitchen 0 counter 0"}, // misplaced
        {{"pan", 0}, "kitchen 0 counter 0"},   // correct
    };
    return task;
}

// Independent shortest-path oracle over (room, cell, heading) states with the
// same action costs the controller pays: forward moves and quarter turns.
int oracle_route_length(const Scene& scene, const AgentPose& start, int target_room,
                        Cell target) {
    const Room& room = scene.rooms[static_cast<std::size_t>(target_room)];
    std::set<Cell> goals;
    for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
        const Cell v = heading_vec(h);
        const Cell c{target.x + v.x, target.y + v.y};
        if (room.is_walkable(c)) goals.insert(c);
    }
    if (goals.empty()) return -1;
    auto at_goal = [&](int r, Cell c) { return r == target_room && goals.count(c) > 0; };
    if (at_goal(start.room, start.cell)) return 0;

    using Key = std::array<int, 4>;  // room, x, y, heading
    auto key = [](int r, Cell c, Heading h) {
        return Key{r, c.x, c.y, static_cast<int>(h)};
    };
    std::map<Key, int> dist;
    std::queue<std::tuple<int, Cell, Heading>> frontier;
    dist[key(start.room, start.cell, start.heading)] = 0;
    frontier.push({start.room, start.cell, start.heading});
    while (!frontier.empty()) {
        auto [r, c, h] = frontier.front();
        frontier.pop();
        const int d = dist.at(key(r, c, h));
        std::vector<std::tuple<int, Cell, Heading>> next;
        if (auto dest = scene.move_dest(r, c, h)) next.push_back({dest->first, dest->second, h});
        next.push_back({r, c, turned_left(h)});
        next.push_back({r, c, turned_right(h)});
        for (const auto& [nr, nc, nh] : next) {
            if (dist.count(key(nr, nc, nh))) continue;
            dist[key(nr, nc, nh)] = d + 1;
            if (at_goal(nr, nc)) return d + 1;
            frontier.push({nr, nc, nh});
        }
    }
    return -1;
}

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("orient_and_gaze turns minimally and matches gaze to tier") {
    const Scene scene = duplex_scene();
    const PreferenceDataset prefs = duplex_prefs();
    Simulator sim(&scene, &prefs);
    sim.reset(duplex_task());
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);

    REQUIRE(sim.state().pose.cell == Cell{0, 0});
    REQUIRE(sim.state().pose.heading == Heading::north);
    REQUIRE(sim.state().pose.gaze == Gaze::level);
    const Cell south_of_agent{0, 1};

    SUBCASE("opposite heading costs two left turns; low tier adds a look down") {
        const auto seq = ctl.orient_and_gaze(south_of_agent, Tier::low);
        CHECK(seq == std::vector<LowLevelAction>{LowLevelAction::turn_left,
                                                 LowLevelAction::turn_left,
                                                 LowLevelAction::look_down});
    }
    SUBCASE("opposite heading, level tier: turns only") {
        CHECK(ctl.orient_and_gaze(south_of_agent, Tier::mid) ==
              std::vector<LowLevelAction>{LowLevelAction::turn_left, LowLevelAction::turn_left});
    }
    SUBCASE("opposite heading, high tier: turns then a look up") {
        CHECK(ctl.orient_and_gaze(south_of_agent, Tier::high) ==
              std::vector<LowLevelAction>{LowLevelAction::turn_left, LowLevelAction::turn_left,
                                          LowLevelAction::look_up});
    }
    SUBCASE("a 90-degree difference costs exactly one matching turn") {
        // Face the heading whose left turn points south.
        for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
            if (turned_left(h) != Heading::south) continue;
            while (sim.state().pose.heading != h) sim.step(LowLevelAction::turn_left);
            CHECK(ctl.orient_and_gaze(south_of_agent, Tier::mid) ==
                  std::vector<LowLevelAction>{LowLevelAction::turn_left});
        }
        for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
            if (turned_right(h) != Heading::south) continue;
            while (sim.state().pose.heading != h) sim.step(LowLevelAction::turn_left);
            CHECK(ctl.orient_and_gaze(south_of_agent, Tier::mid) ==
                  std::vector<LowLevelAction>{LowLevelAction::turn_right});
        }
    }
    SUBCASE("already facing and gazing right: empty sequence") {
        while (sim.state().pose.heading != Heading::south) sim.step(LowLevelAction::turn_left);
        CHECK(ctl.orient_and_gaze(south_of_agent, Tier::mid).empty());
    }
    SUBCASE("gaze distance of two is two gaze steps") {
        while (sim.state().pose.heading != Heading::south) sim.step(LowLevelAction::turn_left);
        sim.step(LowLevelAction::look_down);  // level -> down
        CHECK(ctl.orient_and_gaze(south_of_agent, Tier::high) ==
              std::vector<LowLevelAction>{LowLevelAction::look_up, LowLevelAction::look_up});
    }
    SUBCASE("non-adjacent targets are rejected") {
        CHECK_THROWS_AS(ctl.orient_and_gaze(Cell{0, 2}, Tier::mid), ValidationError);
        CHECK_THROWS_AS(ctl.orient_and_gaze(Cell{1, 1}, Tier::mid), ValidationError);
    }
}

TEST_CASE("route_adjacent_to finds shortest routes, verified against a BFS oracle") {
    const Scene scene = duplex_scene();
    const PreferenceDataset prefs = duplex_prefs();
    Simulator sim(&scene, &prefs);
    sim.reset(duplex_task());
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);

    const LowLevelAction walk_actions[] = {LowLevelAction::move_forward,
                                           LowLevelAction::turn_left,
                                           LowLevelAction::turn_right};
    auto rng = make_rng(mix_seed(3, "controller-routes"));
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        for (int k = 0; k < 12; ++k) sim.step(walk_actions[uniform_index(rng, 3)]);
        for (int room = 0; room < 2; ++room) {
            const Room& r = scene.rooms[static_cast<std::size_t>(room)];
            for (std::size_t i = 0; i < r.receptacles.size(); ++i) {
                const Cell target = r.receptacles[i].cell;
                const int want = oracle_route_length(scene, sim.state().pose, room, target);
                auto route = ctl.route_adjacent_to(room, target);
                REQUIRE(route.has_value());
                CHECK(static_cast<int>(route->size()) == want);

                // The route really ends 4-adjacent to the target in its room.
                Simulator probe = sim;
                for (LowLevelAction a : *route) probe.step(a);
                const AgentPose end = probe.state().pose;
                CHECK(end.room == room);
                CHECK(std::abs(end.cell.x - target.x) + std::abs(end.cell.y - target.y) == 1);
                ++checked;
            }
        }
    }
    CHECK(checked == 40 * 3);
}

TEST_CASE("route_adjacent_to returns an empty route when already adjacent") {
    const Scene scene = duplex_scene();
    const PreferenceDataset prefs = duplex_prefs();
    Simulator sim(&scene, &prefs);
    sim.reset(duplex_task());
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);

    // Walk straight down the left edge to (0, 3), one above the hamper (0, 4).
    while (sim.state().pose.heading != Heading::south) sim.step(LowLevelAction::turn_left);
    for (int i = 0; i < 3; ++i) sim.step(LowLevelAction::move_forward);
    REQUIRE(sim.state().pose.cell == Cell{0, 3});
    auto route = ctl.route_adjacent_to(0, Cell{0, 4});
    REQUIRE(route.has_value());
    CHECK(route->empty());
}

TEST_CASE("a receptacle with no walkable neighbor is unreachable") {
    Scene scene;
    scene.scene_id = "walled";
    Room room;
    room.room_type = "kitchen";
    room.room_index = 0;
    room.width = 3;
    room.height = 3;
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) room.walkable.insert({x, y});
    }
    // The corner counter is fenced in by two more receptacle cells.
    room.receptacles = {Receptacle{"counter", 0, {0, 0}, Tier::mid, 4},
                        Receptacle{"sink", 0, {1, 0}, Tier::mid, 4},
                        Receptacle{"table", 0, {0, 1}, Tier::mid, 4}};
    for (const auto& rec : room.receptacles) room.walkable.erase(rec.cell);
    scene.rooms = {room};
    scene.validate();

    PreferenceDataset prefs;
    prefs.entries["pan"] = {{"kitchen", "counter"}};
    TaskSpec task;
    task.task_id = "walled-task";
    task.scene_id = "walled";
    task.placements = {{{"pan", 0}, "kitchen 0 counter 0"}};

    Simulator sim(&scene, &prefs);
    sim.reset(task);
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);
    CHECK(!ctl.route_adjacent_to(0, Cell{0, 0}).has_value());
    // The fence cells themselves are approachable.
    CHECK(ctl.route_adjacent_to(0, Cell{1, 0}).has_value());
}

TEST_CASE("execute drives a full fetch-and-place workflow") {
    const Scene scene = duplex_scene();
    const PreferenceDataset prefs = duplex_prefs();
    Simulator sim(&scene, &prefs);
    sim.reset(duplex_task());
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);

    int total_steps = 0;
    auto run = [&](HighLevelAction::Verb verb, const std::string& arg1,
                   const std::string& arg2 = "") {
        const ExecResult res = ctl.execute({verb, arg1, arg2});
        total_steps += res.low_level_count;
        CHECK(sim.state().t == total_steps);  // every low-level step is accounted for
        return res;
    };
    using Verb = HighLevelAction::Verb;

    // Entering a room and spinning discovers its receptacles.
    ExecResult res = run(Verb::go_to, "kitchen 0");
    CHECK(res.executed);
    CHECK(res.reason.empty());
    CHECK(graph.rooms[0].visited);
    CHECK(graph.has_receptacle("kitchen 0 counter 0"));
    CHECK(graph.has_receptacle("kitchen 0 hamper 0"));
    // The counter is mid-tier and the gaze is level, so its contents are known.
    REQUIRE(graph.receptacle("kitchen 0 counter 0") != nullptr);
    CHECK(graph.receptacle("kitchen 0 counter 0")->contents_known);
    CHECK(graph.receptacle("kitchen 0 counter 0")->objects ==
          std::vector<std::string>{"mug 1", "towel 0", "pan 0"});
    // The hamper is low-tier: seen, but its contents stay unknown.
    REQUIRE(graph.receptacle("kitchen 0 hamper 0") != nullptr);
    CHECK(!graph.receptacle("kitchen 0 hamper 0")->contents_known);

    res = run(Verb::go_to, "lobby 0");
    CHECK(res.executed);
    CHECK(sim.state().pose.room == 1);
    CHECK(graph.rooms[1].visited);
    CHECK(graph.has_receptacle("lobby 0 shelf 0"));
    CHECK(!graph.receptacle("lobby 0 shelf 0")->contents_known);  // high tier, level gaze

    // The mug is on the shelf but not yet believed anywhere.
    res = run(Verb::go_to, "mug 0");
    CHECK(!res.executed);
    CHECK(res.reason == "undiscovered entity");
    CHECK(res.low_level_count == 0);

    res = run(Verb::look_at, "lobby 0 shelf 0");
    CHECK(res.executed);
    CHECK(graph.receptacle("lobby 0 shelf 0")->contents_known);
    CHECK(graph.receptacle("lobby 0 shelf 0")->objects == std::vector<std::string>{"mug 0"});

    res = run(Verb::go_to, "mug 0");  // resolves through the believed location
    CHECK(res.executed);
    CHECK(sim.state().pose.room == 1);

    // Picking up a correctly placed object costs a point.
    res = run(Verb::pick_up, "mug 0");
    CHECK(res.executed);
    CHECK(res.rewards_accrued == -1);
    REQUIRE(sim.state().held.has_value());
    CHECK(*sim.state().held == "mug 0");
    CHECK(graph.held == sim.state().held);

    res = run(Verb::pick_up, "towel 0");  // hand is occupied
    CHECK(!res.executed);
    CHECK(res.reason == "precondition failed");
    CHECK(res.low_level_count == 0);

    // Putting it back earns the point back.
    res = run(Verb::place, "mug 0", "lobby 0 shelf 0");
    CHECK(res.executed);
    CHECK(res.rewards_accrued == 1);
    CHECK(!sim.state().held.has_value());

    // Fetch the misplaced mug from the kitchen counter.
    res = run(Verb::go_to, "kitchen 0");
    CHECK(res.executed);
    res = run(Verb::look_at, "kitchen 0 counter 0");
    CHECK(res.executed);
    res = run(Verb::pick_up, "mug 1");
    CHECK(res.executed);
    CHECK(res.rewards_accrued == 0);  // it was misplaced, so no penalty

    // Placement preconditions come before target resolution.
    res = run(Verb::place, "mug 1", "lobby 0 bench 5");
    CHECK(!res.executed);
    CHECK(res.reason == "undiscovered entity");
    CHECK(res.low_level_count == 0);
    res = run(Verb::place, "mug 1", "the floor");
    CHECK(!res.executed);
    CHECK(res.reason == "unknown entity");
    CHECK(res.low_level_count == 0);

    // The shelf holds one object and is occupied again.
    res = run(Verb::place, "mug 1", "lobby 0 shelf 0");
    CHECK(!res.executed);
    CHECK(res.reason == "receptacle full");
    CHECK(res.low_level_count > 0);  // it walked there before the refusal
    REQUIRE(sim.state().held.has_value());
    CHECK(*sim.state().held == "mug 1");

    // An incorrect placement still executes, just without reward.
    res = run(Verb::place, "mug 1", "kitchen 0 hamper 0");
    CHECK(res.executed);
    CHECK(res.rewards_accrued == 0);
    CHECK(!sim.state().held.has_value());
}

TEST_CASE("resolution failures consume no time and leave no trace") {
    const Scene scene = duplex_scene();
    const PreferenceDataset prefs = duplex_prefs();
    Simulator sim(&scene, &prefs);
    sim.reset(duplex_task());
    SceneGraph graph = init_graph(scene);
    Controller ctl(&sim, &graph);
    const SceneGraph before = graph;
    using Verb = HighLevelAction::Verb;

    struct Case {
        HighLevelAction action;
        std::string reason;
    };
    const std::vector<Case> cases = {
        {{Verb::go_to, "ghost 9", ""}, "undiscovered entity"},
        {{Verb::go_to, "attic 4", ""}, "undiscovered entity"},
        {{Verb::go_to, "do the thing", ""}, "unknown entity"},
        {{Verb::go_to, "Pan 1", ""}, "unknown entity"},
        {{Verb::look_at, "kitchen 0", ""}, "precondition failed"},
        {{Verb::look_at, "towel 0", ""}, "undiscovered entity"},
        {{Verb::pick_up, "pan 77", ""}, "undiscovered entity"},
        {{Verb::pick_up, "pan!!", ""}, "unknown entity"},
        {{Verb::place, "pan 0", "kitchen 0 counter 0"}, "precondition failed"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.action.arg1);
        const ExecResult res = ctl.execute(c.action);
        CHECK(!res.executed);
        CHECK(res.reason == c.reason);
        CHECK(res.low_level_count == 0);
        CHECK(res.rewards_accrued == 0);
    }
    CHECK(sim.state().t == 0);
    CHECK(graph == before);
}

}  // TEST_SUITE
