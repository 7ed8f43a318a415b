#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tidygrid/sim.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

// The agent's belief graph: what it has seen so far. Starts with every room
// known by name (and nothing else); receptacles and objects appear only once
// observed. Beliefs are updated wholesale when a receptacle's contents are
// revealed, so they converge to ground truth on revisit.
struct SceneGraph {
    struct RecNode {
        bool contents_known = false;
        std::vector<std::string> objects;
    };
    struct RoomNode {
        std::string name;
        bool visited = false;
        std::map<std::string, RecNode> receptacles;  // keyed by display name
    };

    std::vector<RoomNode> rooms;  // scene order ("id order")
    std::optional<std::string> held;

    int find_room(const std::string& room_name) const;  // -1 when absent
    bool has_receptacle(const std::string& rec_name) const;
    const RecNode* receptacle(const std::string& rec_name) const;
    // Receptacle currently believed to hold the object; empty when unknown.
    std::string object_location(const std::string& obj_name) const;
    int receptacle_count() const;
    double unvisited_fraction() const;

    friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

bool operator==(const SceneGraph::RecNode&, const SceneGraph::RecNode&);
bool operator==(const SceneGraph::RoomNode&, const SceneGraph::RoomNode&);

SceneGraph init_graph(const Scene& scene);

// Folds one observation into the graph: marks the agent's room visited,
// inserts/refreshes every observed receptacle, and replaces object lists
// wholesale when contents are revealed (removing those objects from any stale
// location). held mirrors the observation.
void update_graph(SceneGraph& graph, const Observation& obs, const std::string& current_room);

struct Prompt {
    std::string instructions;
    std::string examples;
    std::string state_description;
    std::string query;
    std::string rendered;
};

// Deterministic rendering: INSTRUCTIONS, EXAMPLES (two fixed blocks: one room
// exploration, one single-object move), CURRENT STATE (rooms in id order,
// receptacles name-sorted per room, held line), QUERY.
Prompt render_prompt(const SceneGraph& graph);

// Inverse of render_prompt's CURRENT STATE section: recovers the graph (and
// held object) from a rendered prompt, so persisted interaction records can be
// refit without a separate context format.
SceneGraph parse_prompt(const std::string& rendered);

}  // namespace tidygrid
