#include <algorithm>

#include "tidygrid/world.hpp"

namespace tidygrid {

namespace {

constexpr int kRoomW = 6;
constexpr int kRoomH = 5;

Tier tier_for(const std::string& rec_type) {
    if (rec_type == "cabinet" || rec_type == "shelf" || rec_type == "hook") return Tier::high;
    if (rec_type == "hamper" || rec_type == "bin" || rec_type == "toybox" ||
        rec_type == "bed" || rec_type == "bench") {
        return Tier::low;
    }
    return Tier::mid;
}

Room make_room(const std::string& room_type,
               const std::vector<std::pair<std::string, Cell>>& recs) {
    Room room;
    room.room_type = room_type;
    room.room_index = 0;
    room.width = kRoomW;
    room.height = kRoomH;
    for (int x = 0; x < kRoomW; ++x) {
        for (int y = 0; y < kRoomH; ++y) room.walkable.insert({x, y});
    }
    int index = 0;
    for (const auto& [rec_type, cell] : recs) {
        room.walkable.erase(cell);
        room.receptacles.push_back({rec_type, index++, cell, tier_for(rec_type), 4});
    }
    return room;
}

// Room templates shared across scenes so that preference pairs learned in one
// scene stay meaningful in another.
Room room_for_type(const std::string& room_type) {
    if (room_type == "kitchen") {
        return make_room("kitchen", {{"counter", {0, 0}},
                                     {"sink", {2, 0}},
                                     {"cabinet", {4, 0}},
                                     {"table", {2, 4}}});
    }
    if (room_type == "living room") {
        return make_room("living room",
                         {{"sofa", {2, 0}}, {"shelf", {5, 0}}, {"table", {3, 4}}});
    }
    if (room_type == "corridor") {
        return make_room("corridor", {{"shelf", {5, 0}}, {"hook", {4, 4}}});
    }
    if (room_type == "bathroom") {
        return make_room("bathroom",
                         {{"sink", {0, 0}}, {"cabinet", {2, 0}}, {"hamper", {4, 0}}});
    }
    if (room_type == "utility room") {
        return make_room("utility room",
                         {{"shelf", {0, 0}}, {"washer", {2, 0}}, {"bin", {5, 4}}});
    }
    if (room_type == "pantry room") {
        return make_room("pantry room", {{"shelf", {0, 4}}, {"rack", {3, 4}}});
    }
    if (room_type == "dining room") {
        return make_room("dining room",
                         {{"table", {2, 0}}, {"cabinet", {4, 0}}, {"shelf", {2, 4}}});
    }
    if (room_type == "child's room") {
        return make_room("child's room",
                         {{"desk", {0, 0}}, {"toybox", {3, 0}}, {"bed", {4, 4}}});
    }
    if (room_type == "bedroom") {
        return make_room("bedroom", {{"bed", {0, 4}},
                                     {"dresser", {3, 4}},
                                     {"desk", {5, 0}},
                                     {"nightstand", {2, 0}}});
    }
    if (room_type == "lobby") {
        return make_room("lobby", {{"shelf", {5, 0}}, {"hook", {4, 4}}, {"bench", {3, 0}}});
    }
    throw ValidationError("no built-in room template for '" + room_type + "'");
}

void link(Scene& scene, const std::string& hub, Cell hub_cell, const std::string& leaf,
          Cell leaf_cell) {
    Room& h = scene.rooms[static_cast<std::size_t>(scene.find_room(hub))];
    Room& l = scene.rooms[static_cast<std::size_t>(scene.find_room(leaf))];
    h.doors.push_back({leaf, hub_cell});
    l.doors.push_back({hub, leaf_cell});
}

Scene make_scene(const std::string& scene_id, const std::vector<std::string>& room_types) {
    Scene scene;
    scene.scene_id = scene_id;
    for (const std::string& rt : room_types) scene.rooms.push_back(room_for_type(rt));
    return scene;
}

Scene make_scene1() {
    Scene s = make_scene("scene1", {"kitchen", "living room", "corridor", "bathroom",
                                    "utility room", "pantry room"});
    link(s, "corridor 0", {0, 2}, "kitchen 0", {5, 2});
    link(s, "corridor 0", {5, 2}, "living room 0", {0, 2});
    link(s, "corridor 0", {1, 0}, "bathroom 0", {1, 4});
    link(s, "corridor 0", {3, 0}, "utility room 0", {3, 4});
    link(s, "corridor 0", {1, 4}, "pantry room 0", {1, 0});
    return s;
}

Scene make_scene2() {
    Scene s = make_scene("scene2", {"kitchen", "living room", "dining room", "child's room",
                                    "bathroom", "bedroom"});
    link(s, "living room 0", {0, 2}, "kitchen 0", {5, 2});
    link(s, "living room 0", {5, 2}, "dining room 0", {0, 2});
    link(s, "living room 0", {1, 0}, "child's room 0", {1, 4});
    link(s, "living room 0", {3, 0}, "bathroom 0", {3, 4});
    link(s, "living room 0", {1, 4}, "bedroom 0", {1, 0});
    return s;
}

Scene make_scene3() {
    Scene s = make_scene("scene3", {"corridor", "bathroom", "bedroom"});
    link(s, "corridor 0", {1, 0}, "bathroom 0", {1, 4});
    link(s, "corridor 0", {1, 4}, "bedroom 0", {1, 0});
    return s;
}

Scene make_scene4() {
    Scene s = make_scene("scene4", {"kitchen", "living room", "bathroom", "bedroom", "lobby"});
    link(s, "lobby 0", {0, 2}, "kitchen 0", {5, 2});
    link(s, "lobby 0", {5, 2}, "living room 0", {0, 2});
    link(s, "lobby 0", {1, 0}, "bathroom 0", {1, 4});
    link(s, "lobby 0", {1, 4}, "bedroom 0", {1, 0});
    return s;
}

}  // namespace

std::vector<Scene> builtin_scenes() {
    std::vector<Scene> scenes{make_scene1(), make_scene2(), make_scene3(), make_scene4()};
    for (const Scene& s : scenes) s.validate();
    return scenes;
}

std::vector<std::string> builtin_object_types() {
    return {"pan",    "pot",      "mug",       "plate",     "kettle",     "fork",
            "towel",  "soap",     "toothbrush", "shampoo",  "laptop",     "book",
            "pillow", "blanket",  "teddy",     "puzzle",    "lamp",       "vase",
            "charger", "headphones", "detergent", "brush",  "candle",     "bowl"};
}

PreferenceDataset generate_prefs(const std::vector<Scene>& scenes,
                                 const std::vector<std::string>& object_types,
                                 std::uint64_t seed, int min_pairs, int max_pairs) {
    if (scenes.empty()) throw ValidationError("generate_prefs: no scenes given");
    if (min_pairs < 1 || max_pairs < min_pairs) {
        throw ValidationError("generate_prefs: invalid pair range");
    }
    std::set<std::pair<std::string, std::string>> vocab_set;
    for (const Scene& scene : scenes) {
        for (const Room& room : scene.rooms) {
            for (const Receptacle& rec : room.receptacles) {
                vocab_set.insert({room.room_type, rec.rec_type});
            }
        }
    }
    std::vector<std::pair<std::string, std::string>> vocab(vocab_set.begin(), vocab_set.end());

    PreferenceDataset prefs;
    for (const std::string& obj_type : object_types) {
        auto rng = make_rng(mix_seed(seed, "prefs:" + obj_type));
        std::size_t want = static_cast<std::size_t>(min_pairs) +
                           uniform_index(rng, static_cast<std::size_t>(max_pairs - min_pairs + 1));
        want = std::min(want, vocab.size());
        auto& pairs = prefs.entries[obj_type];
        while (pairs.size() < want) {
            pairs.insert(vocab[uniform_index(rng, vocab.size())]);
        }
    }
    return prefs;
}

namespace {

struct TaskDraft {
    std::vector<std::pair<ObjectInstance, std::string>> placements;
    std::vector<std::string> misplaced_types;  // one entry per misplaced object
};

// Receptacle names in the scene that are correct (or wrong) hosts for a type.
std::vector<std::string> recs_matching(const Scene& scene, const PreferenceDataset& prefs,
                                       const std::string& obj_type, bool want_correct) {
    std::vector<std::string> out;
    for (const Room& room : scene.rooms) {
        for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
            bool correct = prefs.correct(obj_type, room.room_type, room.receptacles[i].rec_type);
            if (correct == want_correct) out.push_back(room.receptacle_name(static_cast<int>(i)));
        }
    }
    return out;
}

// A greedy fixer moves one misplaced object at a time onto some correct
// receptacle with a free slot, in arbitrary order. This never dead-ends if for
// every misplaced object's type T, the initial spare capacity across T's
// correct receptacles covers every misplaced object whose own correct set
// overlaps them: while an object of type T is still waiting, at most
// (claimants - 1) slots have been consumed by moves, and initial occupants can
// only leave.
bool greedy_slack_ok(const Scene& scene, const PreferenceDataset& prefs, const TaskDraft& draft,
                     const std::map<std::string, int>& load) {
    std::set<std::string> types(draft.misplaced_types.begin(), draft.misplaced_types.end());
    std::map<std::string, std::set<std::string>> correct_sets;
    for (const std::string& t : types) {
        auto recs = recs_matching(scene, prefs, t, true);
        correct_sets[t] = std::set<std::string>(recs.begin(), recs.end());
    }
    for (const std::string& t : types) {
        const auto& mine = correct_sets[t];
        if (mine.empty()) return false;
        int spare = 0;
        for (const std::string& rec : mine) {
            RecRef ref = scene.find_receptacle(rec);
            int used = load.count(rec) ? load.at(rec) : 0;
            spare += scene.receptacle(ref).capacity - used;
        }
        int claimants = 0;
        for (const std::string& other : draft.misplaced_types) {
            const auto& theirs = correct_sets[other];
            bool overlap = std::any_of(theirs.begin(), theirs.end(), [&](const std::string& r) {
                return mine.count(r) > 0;
            });
            if (overlap) ++claimants;
        }
        if (spare < claimants) return false;
    }
    return true;
}

}  // namespace

TaskSpec generate_task(const Scene& scene, const PreferenceDataset& prefs, std::uint64_t seed) {
    // Types that can be both misplaced and corrected within this scene.
    std::vector<std::string> usable;
    for (const auto& [obj_type, pairs] : prefs.entries) {
        (void)pairs;
        if (!recs_matching(scene, prefs, obj_type, true).empty() &&
            !recs_matching(scene, prefs, obj_type, false).empty()) {
            usable.push_back(obj_type);
        }
    }
    if (usable.empty()) {
        throw ValidationError("scene '" + scene.scene_id +
                              "' cannot host a solvable task for these preferences");
    }

    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        auto rng = make_rng(mix_seed(seed, "task-attempt", attempt));
        int total = 5 + static_cast<int>(uniform_index(rng, 6));
        int misplaced = std::min(3 + static_cast<int>(uniform_index(rng, 5)), total);

        TaskDraft draft;
        std::map<std::string, int> load;
        std::map<std::string, int> next_index;
        bool failed = false;
        for (int i = 0; i < total && !failed; ++i) {
            bool wrong = i < misplaced;
            const std::string& obj_type = usable[uniform_index(rng, usable.size())];
            std::vector<std::string> options = recs_matching(scene, prefs, obj_type, !wrong);
            std::erase_if(options, [&](const std::string& rec) {
                RecRef ref = scene.find_receptacle(rec);
                int used = load.count(rec) ? load.at(rec) : 0;
                return used >= scene.receptacle(ref).capacity;
            });
            if (options.empty()) {
                failed = true;
                break;
            }
            const std::string& rec = options[uniform_index(rng, options.size())];
            ObjectInstance obj{obj_type, next_index[obj_type]++};
            draft.placements.push_back({obj, rec});
            ++load[rec];
            if (wrong) draft.misplaced_types.push_back(obj_type);
        }
        if (failed || !greedy_slack_ok(scene, prefs, draft, load)) continue;

        TaskSpec task;
        task.task_id = scene.scene_id + "-task-" + std::to_string(seed);
        task.scene_id = scene.scene_id;
        task.seed = seed;
        task.placements = std::move(draft.placements);
        return task;
    }
    throw ValidationError("generate_task: no solvable arrangement found for scene '" +
                          scene.scene_id + "'");
}

}  // namespace tidygrid
