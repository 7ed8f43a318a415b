#include <json.hpp>

#include "tidygrid/io.hpp"
#include "tidygrid/world.hpp"

namespace tidygrid {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError("missing field '" + std::string(key) + "' in " + where);
    }
    return *it;
}

Cell cell_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw ParseError("expected [x, y] cell in " + where);
    }
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

json cell_to_json(Cell c) {
    return json::array({c.x, c.y});
}

}  // namespace

Scene scene_from_json_text(const std::string& text) {
    json j = parse_json_text(text, "scene file");
    Scene scene;
    scene.scene_id = field(j, "scene_id", "scene").get<std::string>();
    for (const json& jr : field(j, "rooms", "scene")) {
        Room room;
        room.room_type = field(jr, "room_type", "room").get<std::string>();
        room.room_index = field(jr, "room_index", "room").get<int>();
        const std::string where = "room '" + room.name() + "'";
        const json& grid = field(jr, "grid", where);
        if (!grid.is_array() || grid.size() != 2) {
            throw ParseError("expected grid [w, h] in " + where);
        }
        room.width = grid[0].get<int>();
        room.height = grid[1].get<int>();
        for (const json& jc : field(jr, "walkable", where)) {
            room.walkable.insert(cell_from_json(jc, where + " walkable"));
        }
        if (jr.contains("doors")) {
            for (const json& jd : jr["doors"]) {
                Door door;
                door.to_room = field(jd, "to", where + " door").get<std::string>();
                door.cell = cell_from_json(field(jd, "cell", where + " door"), where + " door");
                room.doors.push_back(door);
            }
        }
        if (jr.contains("receptacles")) {
            for (const json& jrec : jr["receptacles"]) {
                Receptacle rec;
                rec.rec_type = field(jrec, "rec_type", where).get<std::string>();
                rec.rec_index = field(jrec, "rec_index", where).get<int>();
                rec.cell = cell_from_json(field(jrec, "cell", where), where + " receptacle");
                rec.tier = jrec.contains("tier")
                               ? tier_from_string(jrec["tier"].get<std::string>())
                               : Tier::mid;
                rec.capacity = jrec.contains("capacity") ? jrec["capacity"].get<int>() : 4;
                room.receptacles.push_back(rec);
            }
        }
        scene.rooms.push_back(std::move(room));
    }
    scene.validate();
    return scene;
}

std::string scene_to_json_text(const Scene& scene) {
    json j;
    j["scene_id"] = scene.scene_id;
    j["rooms"] = json::array();
    for (const Room& room : scene.rooms) {
        json jr;
        jr["room_type"] = room.room_type;
        jr["room_index"] = room.room_index;
        jr["grid"] = json::array({room.width, room.height});
        jr["walkable"] = json::array();
        for (Cell c : room.walkable) jr["walkable"].push_back(cell_to_json(c));
        jr["doors"] = json::array();
        for (const Door& d : room.doors) {
            jr["doors"].push_back(json{{"to", d.to_room}, {"cell", cell_to_json(d.cell)}});
        }
        jr["receptacles"] = json::array();
        for (const Receptacle& rec : room.receptacles) {
            jr["receptacles"].push_back(json{{"rec_type", rec.rec_type},
                                             {"rec_index", rec.rec_index},
                                             {"cell", cell_to_json(rec.cell)},
                                             {"tier", to_string(rec.tier)},
                                             {"capacity", rec.capacity}});
        }
        j["rooms"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

Scene load_scene(const std::string& path) {
    return scene_from_json_text(read_file(path));
}

void save_scene(const Scene& scene, const std::string& path) {
    write_file(path, scene_to_json_text(scene));
}

PreferenceDataset prefs_from_json_text(const std::string& text) {
    json j = parse_json_text(text, "preference file");
    if (!j.is_object()) throw ParseError("preference file must be a JSON object");
    PreferenceDataset prefs;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto& pairs = prefs.entries[it.key()];
        for (const json& jp : it.value()) {
            if (!jp.is_array() || jp.size() != 2) {
                throw ParseError("expected [room_type, rec_type] pair for '" + it.key() + "'");
            }
            pairs.insert({jp[0].get<std::string>(), jp[1].get<std::string>()});
        }
        if (pairs.empty()) {
            throw ParseError("object type '" + it.key() + "' has no preference pairs");
        }
    }
    return prefs;
}

std::string prefs_to_json_text(const PreferenceDataset& prefs) {
    json j = json::object();
    for (const auto& [obj_type, pairs] : prefs.entries) {
        json list = json::array();
        for (const auto& [room_type, rec_type] : pairs) {
            list.push_back(json::array({room_type, rec_type}));
        }
        j[obj_type] = std::move(list);
    }
    return j.dump(2) + "\n";
}

PreferenceDataset load_prefs(const std::string& path) {
    return prefs_from_json_text(read_file(path));
}

void save_prefs(const PreferenceDataset& prefs, const std::string& path) {
    write_file(path, prefs_to_json_text(prefs));
}

namespace {

TaskSpec task_from_json(const json& j) {
    TaskSpec task;
    task.task_id = field(j, "task_id", "task").get<std::string>();
    task.scene_id = field(j, "scene_id", "task").get<std::string>();
    task.seed = field(j, "seed", "task").get<std::uint64_t>();
    for (const json& jp : field(j, "placements", "task '" + task.task_id + "'")) {
        if (!jp.is_array() || jp.size() != 2) {
            throw ParseError("expected [object, receptacle] placement in task '" +
                             task.task_id + "'");
        }
        ObjectName obj = parse_object_name(jp[0].get<std::string>());
        task.placements.push_back(
            {ObjectInstance{obj.obj_type, obj.index}, jp[1].get<std::string>()});
    }
    return task;
}

json task_to_json(const TaskSpec& task) {
    json j;
    j["task_id"] = task.task_id;
    j["scene_id"] = task.scene_id;
    j["seed"] = task.seed;
    j["placements"] = json::array();
    for (const auto& [obj, rec] : task.placements) {
        j["placements"].push_back(json::array({obj.name(), rec}));
    }
    return j;
}

}  // namespace

TaskSpec task_from_json_text(const std::string& text) {
    return task_from_json(parse_json_text(text, "task file"));
}

std::string task_to_json_text(const TaskSpec& task) {
    return task_to_json(task).dump(2) + "\n";
}

std::vector<TaskSpec> load_tasks(const std::string& path) {
    json j = parse_json_text(read_file(path), "task file");
    if (!j.is_array()) throw ParseError("task file must be a JSON array");
    std::vector<TaskSpec> tasks;
    for (const json& jt : j) tasks.push_back(task_from_json(jt));
    return tasks;
}

void save_tasks(const std::vector<TaskSpec>& tasks, const std::string& path) {
    json j = json::array();
    for (const TaskSpec& t : tasks) j.push_back(task_to_json(t));
    write_file(path, j.dump(2) + "\n");
}

}  // namespace tidygrid
