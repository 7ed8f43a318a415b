#include "tidygrid/world.hpp"

#include <algorithm>
#include <queue>

namespace tidygrid {

std::string Room::name() const {
    return room_type + " " + std::to_string(room_index);
}

std::string Room::receptacle_name(int rec) const {
    const Receptacle& r = receptacles.at(static_cast<std::size_t>(rec));
    return name() + " " + r.rec_type + " " + std::to_string(r.rec_index);
}

bool Room::in_grid(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
}

bool Room::is_walkable(Cell c) const {
    return walkable.count(c) > 0;
}

int Scene::find_room(const std::string& room_name) const {
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        if (rooms[i].name() == room_name) return static_cast<int>(i);
    }
    return -1;
}

RecRef Scene::find_receptacle(const std::string& rec_name) const {
    auto parsed = try_parse_receptacle_name(rec_name);
    if (!parsed) return {};
    int room = find_room(parsed->room.str());
    if (room < 0) return {};
    const Room& r = rooms[static_cast<std::size_t>(room)];
    for (std::size_t i = 0; i < r.receptacles.size(); ++i) {
        if (r.receptacles[i].rec_type == parsed->rec_type &&
            r.receptacles[i].rec_index == parsed->index) {
            return {room, static_cast<int>(i)};
        }
    }
    return {};
}

const Receptacle& Scene::receptacle(RecRef ref) const {
    return rooms.at(static_cast<std::size_t>(ref.room))
        .receptacles.at(static_cast<std::size_t>(ref.rec));
}

std::string Scene::receptacle_display(RecRef ref) const {
    return rooms.at(static_cast<std::size_t>(ref.room)).receptacle_name(ref.rec);
}

std::vector<std::string> Scene::receptacle_names() const {
    std::vector<std::string> names;
    for (const Room& room : rooms) {
        for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
            names.push_back(room.receptacle_name(static_cast<int>(i)));
        }
    }
    return names;
}

std::optional<std::pair<int, Cell>> Scene::move_dest(int room, Cell from, Heading h) const {
    const Room& r = rooms.at(static_cast<std::size_t>(room));
    Cell v = heading_vec(h);
    Cell dest{from.x + v.x, from.y + v.y};
    for (const Door& d : r.doors) {
        if (d.cell == dest) {
            int target = find_room(d.to_room);
            const Room& tr = rooms.at(static_cast<std::size_t>(target));
            for (const Door& back : tr.doors) {
                if (back.to_room == r.name()) return std::make_pair(target, back.cell);
            }
            return std::nullopt;  // unreachable: validate() enforces symmetry
        }
    }
    if (r.is_walkable(dest)) return std::make_pair(room, dest);
    return std::nullopt;
}

namespace {

bool has_walkable_neighbor(const Room& room, Cell c) {
    for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
        Cell v = heading_vec(h);
        if (room.is_walkable({c.x + v.x, c.y + v.y})) return true;
    }
    return false;
}

}  // namespace

void Scene::validate() const {
    if (scene_id.empty()) throw ValidationError("scene_id must be non-empty");
    if (rooms.empty()) throw ValidationError("scene '" + scene_id + "' has no rooms");

    std::set<std::string> room_names;
    for (const Room& room : rooms) {
        if (!valid_room_type(room.room_type)) {
            throw ValidationError("invalid room_type '" + room.room_type + "'");
        }
        if (room.room_index < 0) throw ValidationError("negative room_index in " + room.name());
        if (!room_names.insert(room.name()).second) {
            throw ValidationError("duplicate room name '" + room.name() + "'");
        }
        if (room.width <= 0 || room.height <= 0) {
            throw ValidationError("room '" + room.name() + "' has non-positive grid");
        }
        if (room.walkable.empty()) {
            throw ValidationError("room '" + room.name() + "' has no walkable cells");
        }
        for (Cell c : room.walkable) {
            if (!room.in_grid(c)) {
                throw ValidationError("walkable cell outside grid in '" + room.name() + "'");
            }
        }
        std::set<std::pair<std::string, int>> rec_keys;
        for (const Receptacle& rec : room.receptacles) {
            std::string display = room.name() + " " + rec.rec_type + " " +
                                  std::to_string(rec.rec_index);
            if (!valid_type_token(rec.rec_type)) {
                throw ValidationError("invalid rec_type in '" + display + "'");
            }
            if (rec.rec_index < 0) throw ValidationError("negative rec_index in '" + display + "'");
            if (!rec_keys.insert({rec.rec_type, rec.rec_index}).second) {
                throw ValidationError("duplicate receptacle '" + display + "'");
            }
            if (rec.capacity < 1) throw ValidationError("capacity < 1 on '" + display + "'");
            if (!room.in_grid(rec.cell)) {
                throw ValidationError("receptacle cell outside grid: '" + display + "'");
            }
            if (room.is_walkable(rec.cell)) {
                throw ValidationError("receptacle cell must not be walkable: '" + display + "'");
            }
            if (!has_walkable_neighbor(room, rec.cell)) {
                throw ValidationError("no walkable cell adjacent to '" + display + "'");
            }
        }
    }

    // Door invariants: in-grid, walkable, adjacent to open floor, symmetric.
    for (const Room& room : rooms) {
        std::set<std::string> door_targets;
        for (const Door& door : room.doors) {
            if (room_names.count(door.to_room) == 0) {
                throw ValidationError("unknown room '" + door.to_room + "' in door of '" +
                                      room.name() + "'");
            }
            if (door.to_room == room.name()) {
                throw ValidationError("door to self in '" + room.name() + "'");
            }
            if (!door_targets.insert(door.to_room).second) {
                throw ValidationError("duplicate door to '" + door.to_room + "' in '" +
                                      room.name() + "'");
            }
            if (!room.in_grid(door.cell)) {
                throw ValidationError("door cell outside grid in '" + room.name() + "'");
            }
            if (!room.is_walkable(door.cell)) {
                throw ValidationError("door cell must be walkable in '" + room.name() + "'");
            }
            if (!has_walkable_neighbor(room, door.cell)) {
                throw ValidationError("no walkable cell adjacent to door in '" + room.name() + "'");
            }
            // Symmetric back-link.
            int target = find_room(door.to_room);
            bool back = false;
            for (const Door& d : rooms[static_cast<std::size_t>(target)].doors) {
                if (d.to_room == room.name()) back = true;
            }
            if (!back) {
                throw ValidationError("door '" + room.name() + "' -> '" + door.to_room +
                                      "' lacks a symmetric back-link");
            }
        }
    }

    // Room connectivity over door links.
    std::vector<bool> seen(rooms.size(), false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    while (!frontier.empty()) {
        int i = frontier.front();
        frontier.pop();
        for (const Door& door : rooms[static_cast<std::size_t>(i)].doors) {
            int j = find_room(door.to_room);
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                frontier.push(j);
            }
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
        throw ValidationError("scene '" + scene_id + "' is not connected");
    }
}

std::string ObjectInstance::name() const {
    return obj_type + " " + std::to_string(obj_index);
}

bool PreferenceDataset::correct(const std::string& obj_type, const std::string& room_type,
                                const std::string& rec_type) const {
    auto it = entries.find(obj_type);
    if (it == entries.end()) return false;
    return it->second.count({room_type, rec_type}) > 0;
}

bool is_correct_placement(const std::string& obj_name, const std::string& rec_name,
                          const Scene& scene, const PreferenceDataset& prefs) {
    auto obj = try_parse_object_name(obj_name);
    if (!obj) throw ValidationError("unknown object name '" + obj_name + "'");
    RecRef ref = scene.find_receptacle(rec_name);
    if (!ref.valid()) throw ValidationError("unknown receptacle name '" + rec_name + "'");
    if (!prefs.has(obj->obj_type)) {
        throw ValidationError("no preference entry for object type '" + obj->obj_type + "'");
    }
    const Room& room = scene.rooms[static_cast<std::size_t>(ref.room)];
    return prefs.correct(obj->obj_type, room.room_type, scene.receptacle(ref).rec_type);
}

CorrectCount count_correct(const WorldState& state, const Scene& scene,
                           const PreferenceDataset& prefs) {
    CorrectCount out;
    for (const auto& [rec_name, objects] : state.placements) {
        for (const std::string& obj : objects) {
            if (is_correct_placement(obj, rec_name, scene, prefs)) {
                ++out.correct;
            } else {
                ++out.misplaced;
            }
        }
    }
    return out;
}

}  // namespace tidygrid
