#include <doctest.h>

#include <string>
#include <vector>

#include "tidygrid/world.hpp"

using namespace tidygrid;

namespace {

PreferenceDataset pan_prefs() {
    PreferenceDataset prefs;
    prefs.entries["pan"] = {{"kitchen", "counter"}};
    prefs.entries["mug"] = {{"kitchen", "counter"}, {"living room", "table"}};
    return prefs;
}

}  // namespace

TEST_SUITE("world") {

TEST_CASE("builtin scenes validate and carry the documented room lists") {
    const auto scenes = builtin_scenes();
    REQUIRE(scenes.size() == 4);
    for (const auto& scene : scenes) scene.validate();

    auto names = [](const Scene& s) {
        std::vector<std::string> out;
        for (const auto& r : s.rooms) out.push_back(r.name());
        return out;
    };
    CHECK(scenes[0].scene_id == "scene1");
    CHECK(names(scenes[2]) ==
          std::vector<std::string>{"corridor 0", "bathroom 0", "bedroom 0"});
    CHECK(names(scenes[3]) == std::vector<std::string>{"kitchen 0", "living room 0",
                                                       "bathroom 0", "bedroom 0", "lobby 0"});
    // Every scene has at least one receptacle per room.
    for (const auto& scene : scenes) {
        for (const auto& room : scene.rooms) CHECK(!room.receptacles.empty());
    }
}

TEST_CASE("scene json round-trip is byte-stable") {
    for (const auto& scene : builtin_scenes()) {
        const std::string text = scene_to_json_text(scene);
        const Scene back = scene_from_json_text(text);
        CHECK(scene_to_json_text(back) == text);
        back.validate();
    }
}

TEST_CASE("validate names the violated invariant") {
    Scene scene = builtin_scenes()[2];

    SUBCASE("door to a nonexistent room") {
        scene.rooms[0].doors[0].to_room = "attic 0";
        CHECK_THROWS_WITH_AS(scene.validate(),
                             doctest::Contains("unknown room"), ValidationError);
    }
    SUBCASE("walkable receptacle cell") {
        scene.rooms[0].walkable.insert(scene.rooms[0].receptacles[0].cell);
        CHECK_THROWS_WITH_AS(scene.validate(),
                             doctest::Contains("must not be walkable"), ValidationError);
    }
    SUBCASE("zero capacity") {
        scene.rooms[0].receptacles[0].capacity = 0;
        CHECK_THROWS_WITH_AS(scene.validate(), doctest::Contains("capacity"), ValidationError);
    }
    SUBCASE("duplicate room name") {
        scene.rooms[1].room_type = scene.rooms[0].room_type;
        scene.rooms[1].room_index = scene.rooms[0].room_index;
        CHECK_THROWS_WITH_AS(scene.validate(), doctest::Contains("duplicate room"),
                             ValidationError);
    }
}

TEST_CASE("minimal one-room scene is legal") {
    Scene scene;
    scene.scene_id = "tiny";
    Room room;
    room.room_type = "kitchen";
    room.room_index = 0;
    room.width = 3;
    room.height = 3;
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) room.walkable.insert({x, y});
    }
    room.walkable.erase({2, 2});
    room.receptacles.push_back(Receptacle{"counter", 0, {2, 2}, Tier::mid, 4});
    scene.rooms.push_back(room);
    CHECK_NOTHROW(scene.validate());
}

TEST_CASE("is_correct_placement consults the preference pairs") {
    const Scene scene = builtin_scenes()[0];  // has kitchen 0 with counters and tables
    const PreferenceDataset prefs = pan_prefs();
    // Find one counter and one table in the kitchen.
    std::string counter;
    std::string table;
    for (const auto& room : scene.rooms) {
        if (room.room_type != "kitchen") continue;
        for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
            const auto& rec = room.receptacles[i];
            if (rec.rec_type == "counter" && counter.empty()) {
                counter = room.receptacle_name(static_cast<int>(i));
            }
            if (rec.rec_type == "table" && table.empty()) {
                table = room.receptacle_name(static_cast<int>(i));
            }
        }
    }
    REQUIRE(!counter.empty());
    REQUIRE(!table.empty());
    CHECK(is_correct_placement("pan 1", counter, scene, prefs));
    CHECK_FALSE(is_correct_placement("pan 1", table, scene, prefs));
    CHECK_THROWS_AS(is_correct_placement("ghost 1", counter, scene, prefs), ValidationError);
    CHECK_THROWS_AS(is_correct_placement("pan 1", "kitchen 9 counter 0", scene, prefs),
                    ValidationError);
}

TEST_CASE("count_correct partitions placed objects and skips the hand") {
    const Scene scene = builtin_scenes()[0];
    const PreferenceDataset prefs = pan_prefs();
    std::string counter;
    std::string table;
    for (const auto& room : scene.rooms) {
        if (room.room_type != "kitchen") continue;
        for (std::size_t i = 0; i < room.receptacles.size(); ++i) {
            const auto& rec = room.receptacles[i];
            if (rec.rec_type == "counter" && counter.empty()) {
                counter = room.receptacle_name(static_cast<int>(i));
            }
            if (rec.rec_type == "table" && table.empty()) {
                table = room.receptacle_name(static_cast<int>(i));
            }
        }
    }
    WorldState state;
    state.placements[counter] = {"pan 0", "mug 0"};
    state.placements[table] = {"pan 1", "pan 2"};
    const CorrectCount counts = count_correct(state, scene, prefs);
    CHECK(counts.correct == 2);
    CHECK(counts.misplaced == 2);

    state.held = "pan 3";  // held objects belong to neither bucket
    const CorrectCount counts2 = count_correct(state, scene, prefs);
    CHECK(counts2.correct + counts2.misplaced == 4);
}

TEST_CASE("task json round-trip") {
    const auto scenes = builtin_scenes();
    const auto prefs = generate_prefs(scenes, builtin_object_types(), 5);
    const TaskSpec task = generate_task(scenes[0], prefs, 17);
    const std::string text = task_to_json_text(task);
    const TaskSpec back = task_from_json_text(text);
    CHECK(task_to_json_text(back) == text);
    CHECK(back.task_id == task.task_id);
    CHECK(back.placements.size() == task.placements.size());
}

TEST_CASE("prefs json round-trip") {
    const auto scenes = builtin_scenes();
    const auto prefs = generate_prefs(scenes, builtin_object_types(), 5);
    const std::string text = prefs_to_json_text(prefs);
    const PreferenceDataset back = prefs_from_json_text(text);
    CHECK(prefs_to_json_text(back) == text);
    CHECK(back.entries == prefs.entries);
}

}  // TEST_SUITE
