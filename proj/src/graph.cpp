#include "tidygrid/graph.hpp"

#include <algorithm>

namespace tidygrid {

bool operator==(const SceneGraph::RecNode& a, const SceneGraph::RecNode& b) {
    return a.contents_known == b.contents_known && a.objects == b.objects;
}

bool operator==(const SceneGraph::RoomNode& a, const SceneGraph::RoomNode& b) {
    return a.name == b.name && a.visited == b.visited && a.receptacles == b.receptacles;
}

int SceneGraph::find_room(const std::string& room_name) const {
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        if (rooms[i].name == room_name) return static_cast<int>(i);
    }
    return -1;
}

bool SceneGraph::has_receptacle(const std::string& rec_name) const {
    return receptacle(rec_name) != nullptr;
}

const SceneGraph::RecNode* SceneGraph::receptacle(const std::string& rec_name) const {
    for (const RoomNode& room : rooms) {
        auto it = room.receptacles.find(rec_name);
        if (it != room.receptacles.end()) return &it->second;
    }
    return nullptr;
}

std::string SceneGraph::object_location(const std::string& obj_name) const {
    for (const RoomNode& room : rooms) {
        for (const auto& [rec_name, node] : room.receptacles) {
            if (std::find(node.objects.begin(), node.objects.end(), obj_name) !=
                node.objects.end()) {
                return rec_name;
            }
        }
    }
    return {};
}

int SceneGraph::receptacle_count() const {
    int n = 0;
    for (const RoomNode& room : rooms) n += static_cast<int>(room.receptacles.size());
    return n;
}

double SceneGraph::unvisited_fraction() const {
    if (rooms.empty()) return 0.0;
    int unvisited = 0;
    for (const RoomNode& room : rooms) {
        if (!room.visited) ++unvisited;
    }
    return static_cast<double>(unvisited) / static_cast<double>(rooms.size());
}

SceneGraph init_graph(const Scene& scene) {
    SceneGraph graph;
    for (const Room& room : scene.rooms) {
        graph.rooms.push_back({room.name(), false, {}});
    }
    return graph;
}

namespace {

void remove_object_everywhere(SceneGraph& graph, const std::string& obj) {
    for (auto& room : graph.rooms) {
        for (auto& [rec_name, node] : room.receptacles) {
            std::erase(node.objects, obj);
        }
    }
}

}  // namespace

void update_graph(SceneGraph& graph, const Observation& obs, const std::string& current_room) {
    int room_idx = graph.find_room(current_room);
    if (room_idx < 0) throw ValidationError("observation from unknown room '" + current_room + "'");
    graph.rooms[static_cast<std::size_t>(room_idx)].visited = true;

    for (const ObsEntry& entry : obs.observed) {
        auto parsed = try_parse_receptacle_name(entry.receptacle);
        if (!parsed) {
            throw ValidationError("malformed receptacle name in observation: '" +
                                  entry.receptacle + "'");
        }
        int host = graph.find_room(parsed->room.str());
        if (host < 0) {
            throw ValidationError("observed receptacle '" + entry.receptacle +
                                  "' belongs to no known room");
        }
        auto& node = graph.rooms[static_cast<std::size_t>(host)].receptacles[entry.receptacle];
        if (entry.contents_known) {
            for (const std::string& obj : entry.objects) remove_object_everywhere(graph, obj);
            node.contents_known = true;
            node.objects = entry.objects;
        }
        // Tier-gated sightings leave any previously known contents untouched.
    }

    if (obs.held) remove_object_everywhere(graph, *obs.held);
    graph.held = obs.held;
}

}  // namespace tidygrid
