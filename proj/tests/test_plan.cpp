#include <doctest.h>

#include <string>
#include <vector>

#include "tidygrid/plan.hpp"

using namespace tidygrid;

namespace {

using Verb = HighLevelAction::Verb;

HighLevelAction act(Verb verb, std::string arg1, std::string arg2 = "") {
    return {verb, std::move(arg1), std::move(arg2)};
}

}  // namespace

TEST_SUITE("plan") {

TEST_CASE("each verb form parses to the expected structure") {
    const ParsedPlan parsed = parse_plan(
        "go to kitchen 0, look at kitchen 0 counter 0, pick up pan 0, "
        "place pan 0 on kitchen 0 counter 0");
    REQUIRE(parsed.plan.actions.size() == 4);
    CHECK(parsed.skipped.empty());
    CHECK(parsed.plan.actions[0] == act(Verb::go_to, "kitchen 0"));
    CHECK(parsed.plan.actions[1] == act(Verb::look_at, "kitchen 0 counter 0"));
    CHECK(parsed.plan.actions[2] == act(Verb::pick_up, "pan 0"));
    CHECK(parsed.plan.actions[3] == act(Verb::place, "pan 0", "kitchen 0 counter 0"));
    CHECK(parsed.generated_count() == 4);
}

TEST_CASE("numbering, bullets, case, and whitespace are normalized away") {
    const ParsedPlan parsed = parse_plan(
        "1. GO TO   kitchen 0\n"
        "2) Look At kitchen 0 sink 1\n"
        "- pick up PAN 0\n"
        "* PLACE pan 0 ON kitchen 0 counter 0");
    REQUIRE(parsed.plan.actions.size() == 4);
    CHECK(parsed.skipped.empty());
    CHECK(parsed.plan.actions[0] == act(Verb::go_to, "kitchen 0"));
    CHECK(parsed.plan.actions[1] == act(Verb::look_at, "kitchen 0 sink 1"));
    CHECK(parsed.plan.actions[2] == act(Verb::pick_up, "pan 0"));
    CHECK(parsed.plan.actions[3] == act(Verb::place, "pan 0", "kitchen 0 counter 0"));
}

TEST_CASE("unusable fragments are skipped with a reason, not fatal") {
    SUBCASE("unknown verb") {
        const ParsedPlan parsed = parse_plan("go to pan 1, dance wildly, pick up pan 1");
        CHECK(parsed.plan.actions.size() == 2);
        REQUIRE(parsed.skipped.size() == 1);
        CHECK(parsed.skipped[0].fragment == "dance wildly");
        CHECK(parsed.skipped[0].reason == "unrecognized verb form");
        CHECK(parsed.generated_count() == 3);
    }
    SUBCASE("place without an 'on' clause") {
        const ParsedPlan parsed = parse_plan("place mug 0 near sink");
        CHECK(parsed.plan.actions.empty());
        REQUIRE(parsed.skipped.size() == 1);
        CHECK(parsed.skipped[0].reason == "unrecognized verb form");
    }
    SUBCASE("verb with no argument") {
        // Normalization strips the trailing space, so the bare verb no longer
        // matches any verb prefix.
        const ParsedPlan parsed = parse_plan("go to , pick up pan 0");
        CHECK(parsed.plan.actions.size() == 1);
        REQUIRE(parsed.skipped.size() == 1);
        CHECK(parsed.skipped[0].fragment == "go to");
        CHECK(parsed.skipped[0].reason == "unrecognized verb form");
    }
    SUBCASE("blank fragments between separators are not actions") {
        const ParsedPlan parsed = parse_plan(",,\n, go to pan 0 ,,");
        CHECK(parsed.plan.actions.size() == 1);
        CHECK(parsed.skipped.empty());
        CHECK(parsed.generated_count() == 1);
    }
    SUBCASE("empty and garbage-only input gives an empty plan") {
        CHECK(parse_plan("").plan.empty());
        CHECK(parse_plan("I cannot help with that.").plan.empty());
        CHECK(parse_plan("I cannot help with that.").skipped.size() == 1);
    }
}

TEST_CASE("plans are truncated to ten actions") {
    std::string text;
    for (int i = 0; i < 15; ++i) {
        if (i > 0) text += ", ";
        text += "go to pan " + std::to_string(i);
    }
    const ParsedPlan parsed = parse_plan(text);
    REQUIRE(parsed.plan.actions.size() == kMaxPlanLength);
    for (int i = 0; i < kMaxPlanLength; ++i) {
        CHECK(parsed.plan.actions[static_cast<std::size_t>(i)].arg1 ==
              "pan " + std::to_string(i));
    }
    // Fragments beyond the cutoff are ignored, so generated_count stays at 10.
    CHECK(parsed.skipped.empty());
    CHECK(parsed.generated_count() == kMaxPlanLength);
}

TEST_CASE("render_plan is canonical and parse_plan inverts it") {
    Plan plan;
    plan.actions = {act(Verb::go_to, "bathroom 0"),
                    act(Verb::look_at, "bathroom 0 sink 0"),
                    act(Verb::pick_up, "towel 2"),
                    act(Verb::place, "towel 2", "bathroom 0 hamper 2")};
    const std::string text = render_plan(plan);
    CHECK(text ==
          "go to bathroom 0, look at bathroom 0 sink 0, pick up towel 2, "
          "place towel 2 on bathroom 0 hamper 2");
    const ParsedPlan reparsed = parse_plan(text);
    CHECK(reparsed.plan == plan);
    CHECK(reparsed.skipped.empty());
}

TEST_CASE("round-trip property over generated plans") {
    const std::vector<std::string> entities = {
        "kitchen 0",           "living room 0",        "pan 0",
        "mug 3",               "child's room 0",       "kitchen 0 counter 0",
        "living room 0 shelf 1", "child's room 0 toybox 1", "towel 12"};
    auto rng = make_rng(mix_seed(7, "plan-roundtrip"));
    for (int trial = 0; trial < 200; ++trial) {
        Plan plan;
        const std::size_t len = uniform_index(rng, 11);  // 0..10 actions
        for (std::size_t i = 0; i < len; ++i) {
            const auto verb = static_cast<Verb>(uniform_index(rng, 4));
            HighLevelAction action;
            action.verb = verb;
            action.arg1 = entities[uniform_index(rng, entities.size())];
            if (verb == Verb::place) {
                action.arg2 = entities[uniform_index(rng, entities.size())];
            }
            plan.actions.push_back(std::move(action));
        }
        const ParsedPlan reparsed = parse_plan(render_plan(plan));
        CHECK(reparsed.plan == plan);
        CHECK(reparsed.skipped.empty());
    }
}

TEST_CASE("parser is total over arbitrary bytes") {
    auto rng = make_rng(mix_seed(11, "plan-fuzz"));
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const std::size_t len = uniform_index(rng, 120);
        for (std::size_t i = 0; i < len; ++i) {
            text += static_cast<char>(uniform_index(rng, 256));
        }
        const ParsedPlan parsed = parse_plan(text);  // must not throw
        CHECK(parsed.plan.actions.size() <= static_cast<std::size_t>(kMaxPlanLength));
        CHECK(parsed.generated_count() >=
              static_cast<int>(parsed.plan.actions.size()));
    }
}

}  // TEST_SUITE
