#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tidygrid/base.hpp"
#include "tidygrid/names.hpp"

namespace tidygrid {

struct Receptacle {
    std::string rec_type;
    int rec_index = 0;
    Cell cell;
    Tier tier = Tier::mid;
    int capacity = 4;
};

struct Door {
    std::string to_room;  // display name of the room this door leads to
    Cell cell;
};

struct Room {
    std::string room_type;
    int room_index = 0;
    int width = 0;
    int height = 0;
    std::set<Cell> walkable;
    std::vector<Door> doors;
    std::vector<Receptacle> receptacles;

    std::string name() const;
    std::string receptacle_name(int rec) const;
    bool in_grid(Cell c) const;
    bool is_walkable(Cell c) const;
};

// Resolved reference to a receptacle: indices into Scene::rooms and
// Room::receptacles.
struct RecRef {
    int room = -1;
    int rec = -1;

    bool valid() const { return room >= 0 && rec >= 0; }
};

struct Scene {
    std::string scene_id;
    std::vector<Room> rooms;  // file order; "id order" throughout means this order

    int find_room(const std::string& room_name) const;          // -1 when absent
    RecRef find_receptacle(const std::string& rec_name) const;  // invalid when absent
    const Receptacle& receptacle(RecRef ref) const;
    std::string receptacle_display(RecRef ref) const;
    std::vector<std::string> receptacle_names() const;  // room order, then list order

    // Destination of a forward move from (room, cell) along heading: either a
    // plain walkable cell, a door teleport into the linked room, or nothing
    // when blocked.
    std::optional<std::pair<int, Cell>> move_dest(int room, Cell from, Heading h) const;

    // Throws ValidationError naming the first violated invariant.
    void validate() const;
};

struct ObjectInstance {
    std::string obj_type;
    int obj_index = 0;

    std::string name() const;
    friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct PreferenceDataset {
    // obj_type -> set of (room_type, rec_type) pairs deemed correct.
    std::map<std::string, std::set<std::pair<std::string, std::string>>> entries;

    bool correct(const std::string& obj_type, const std::string& room_type,
                 const std::string& rec_type) const;
    bool has(const std::string& obj_type) const { return entries.count(obj_type) > 0; }
};

struct TaskSpec {
    std::string task_id;
    std::string scene_id;
    std::uint64_t seed = 0;
    std::vector<std::pair<ObjectInstance, std::string>> placements;  // (object, receptacle name)
};

struct AgentPose {
    int room = 0;
    Cell cell;
    Heading heading = Heading::north;
    Gaze gaze = Gaze::level;
};

struct WorldState {
    std::map<std::string, std::vector<std::string>> placements;  // receptacle name -> objects
    std::optional<std::string> held;
    AgentPose pose;
    int t = 0;
};

// --- correctness oracle ---------------------------------------------------

// True iff the receptacle's (room_type, rec_type) pair is listed for the
// object's type. Throws ValidationError on malformed names or unknown types.
bool is_correct_placement(const std::string& obj_name, const std::string& rec_name,
                          const Scene& scene, const PreferenceDataset& prefs);

struct CorrectCount {
    int correct = 0;
    int misplaced = 0;
};

// Counts placed objects only; a held object is counted in neither bucket.
CorrectCount count_correct(const WorldState& state, const Scene& scene,
                           const PreferenceDataset& prefs);

// --- scene serialization ---------------------------------------------------

Scene load_scene(const std::string& path);
Scene scene_from_json_text(const std::string& text);
std::string scene_to_json_text(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

PreferenceDataset load_prefs(const std::string& path);
PreferenceDataset prefs_from_json_text(const std::string& text);
std::string prefs_to_json_text(const PreferenceDataset& prefs);
void save_prefs(const PreferenceDataset& prefs, const std::string& path);

TaskSpec task_from_json_text(const std::string& text);
std::string task_to_json_text(const TaskSpec& task);
std::vector<TaskSpec> load_tasks(const std::string& path);
void save_tasks(const std::vector<TaskSpec>& tasks, const std::string& path);

// --- built-in content -------------------------------------------------------

// Four fixed household layouts (6x5-cell rooms joined through door cells, one
// hub room each). Room lists: scene1 = kitchen, living room, corridor,
// bathroom, utility room, pantry room; scene2 = kitchen, living room, dining
// room, child's room, bathroom, bedroom; scene3 = corridor, bathroom, bedroom;
// scene4 = kitchen, living room, bathroom, bedroom, lobby.
std::vector<Scene> builtin_scenes();

// Object-type vocabulary used by the preference generator.
std::vector<std::string> builtin_object_types();

// --- generators -------------------------------------------------------------

// Draws, for each object type, between min_pairs and max_pairs distinct
// correct (room_type, rec_type) pairs from the union vocabulary of the given
// scenes. Deterministic in (scenes, types, seed).
PreferenceDataset generate_prefs(const std::vector<Scene>& scenes,
                                 const std::vector<std::string>& object_types,
                                 std::uint64_t seed, int min_pairs = 1, int max_pairs = 3);

// Generates a solvable task: 5-10 objects, 3-7 of them misplaced, capacities
// respected, and enough spare capacity on every misplaced object's correct
// receptacles that a greedy one-object-at-a-time fixer can never dead-end.
TaskSpec generate_task(const Scene& scene, const PreferenceDataset& prefs, std::uint64_t seed);

}  // namespace tidygrid
