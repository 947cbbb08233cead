#include <doctest.h>

#include <random>

#include "mapf/prompting.hpp"
#include "support/fixtures.hpp"

using namespace mapf;

TEST_SUITE("prompting") {

TEST_CASE("system_prompt fills the map-description slot") {
    Message msg = system_prompt("room-like map with size 32*32");
    CHECK(msg.role == Role::System);
    CHECK(msg.text == testing::read_golden("fig8_system_room.txt"));

    Message empty_map = system_prompt("a map with size 8*8 and no obstacle");
    CHECK(empty_map.text.find("system of a map with size 8*8 and no obstacle. You will") !=
          std::string::npos);

    // degenerate but permitted
    Message blank = system_prompt("");
    CHECK(blank.text.find("system of . You will") != std::string::npos);
}

TEST_CASE("system_prompt OS variant asks for a whole plan") {
    Message msg = system_prompt("room-like map with size 32*32", Mode::OS);
    CHECK(msg.text.find("single-step action") == std::string::npos);
    CHECK(msg.text.find("complete step-by-step plan") != std::string::npos);
    CHECK(msg.text.find("Step [[t]]:") != std::string::npos);
}

TEST_CASE("default_map_description follows the map family") {
    GridMap room(32, 32, {{1, 1}}, "room-32-32-4");
    CHECK(default_map_description(room) == "room-like map with size 32*32");
    GridMap maze(32, 32, {{1, 1}}, "maze-32-32-2");
    CHECK(default_map_description(maze) == "maze-like map with size 32*32");
    GridMap empty(8, 8, {}, "empty-8-8");
    CHECK(default_map_description(empty) == "a map with size 8*8 and no obstacle");
    GridMap anon(5, 7, {{1, 1}});
    CHECK(default_map_description(anon) == "a map with size 5*7");
}

TEST_CASE("scenario_prompt TOM+SSO matches the transcribed example") {
    Instance inst = testing::symmetry_instance();
    PromptVariant v{MapEncoding::TOM, true, Mode::SBS};
    Message msg = scenario_prompt(inst, v);
    CHECK(msg.role == Role::User);
    CHECK_FALSE(msg.image.has_value());
    CHECK(msg.text == testing::read_golden("fig2_scenario_tom_sso.txt"));
}

TEST_CASE("scenario_prompt with encoding None keeps only the agent lines") {
    Instance inst = testing::symmetry_instance();
    Message msg = scenario_prompt(inst, PromptVariant{MapEncoding::None, false, Mode::SBS});
    CHECK(msg.text ==
          "Agent 1 is currently in (0,2), and wants to go to (3,1).\n"
          "Agent 2 is currently in (1,3), and wants to go to (2,0).");
}

TEST_CASE("scenario_prompt TOO lists obstacles row-major") {
    Instance inst = testing::symmetry_instance();
    Message msg = scenario_prompt(inst, PromptVariant{MapEncoding::TOO, false, Mode::SBS});
    CHECK(msg.text.find("The obstacles are located at: (1,0), (3,2).") != std::string::npos);
}

TEST_CASE("scenario_prompt MM attaches the rendered map") {
    Instance inst = testing::symmetry_instance();
    Message msg = scenario_prompt(inst, PromptVariant{MapEncoding::MM, true, Mode::SBS});
    REQUIRE(msg.image.has_value());
    CHECK(msg.image->width_px == 4 * msg.image->cell_size);
    CHECK(msg.text.find("The map is as follows") == std::string::npos);
    CHECK(msg.text.find("In the next step:") != std::string::npos);
}

TEST_CASE("sso_line reproduces the observation lines") {
    GridMap m = testing::symmetry_map();
    CHECK(sso_line(1, m, {0, 2}) == testing::read_golden("fig2_sso_agent1.txt"));
    CHECK(sso_line(2, m, {1, 3}) == testing::read_golden("fig2_sso_agent2.txt"));
    CHECK(sso_line(1, GridMap(1, 1), {0, 0}) == "Agent 1 can move ['stay at (0, 0)'].");
}

TEST_CASE("sso on an interior free cell lists all five actions") {
    GridMap m(8, 8);
    CHECK(sso_line(1, m, {4, 4}) ==
          "Agent 1 can move ['stay at (4, 4)', 'left to (3, 4)', 'right to (5, 4)', "
          "'up to (4, 5)', 'down to (4, 3)'].");
}

TEST_CASE("feedback_message success block matches the transcription") {
    GridMap m = testing::symmetry_map();
    std::vector<std::string> sso{sso_line(1, m, {0, 2}), sso_line(2, m, {1, 3})};
    CHECK(feedback_message({}, sso) == testing::read_golden("fig3_feedback_success.txt"));
    CHECK(feedback_message({}, std::nullopt) == "Good job. Keep moving.");
}

TEST_CASE("feedback_message failure sentences match the transcription") {
    ValidationReport vertex;
    vertex.violations.push_back(VertexConflict{{1, 2}, {0, 0}});
    vertex.violations.push_back(VertexConflict{{4, 5}, {1, 1}});
    CHECK(feedback_message(vertex, std::nullopt) ==
          testing::read_golden("fig3_feedback_vertex.txt"));

    ValidationReport obstacle;
    obstacle.violations.push_back(ObstacleCollision{{2, 4}});
    CHECK(feedback_message(obstacle, std::nullopt) ==
          testing::read_golden("fig3_feedback_obstacle.txt"));

    SUBCASE("both kinds: vertex sentence first") {
        ValidationReport both;
        both.violations.push_back(ObstacleCollision{{3}});
        both.violations.push_back(VertexConflict{{1, 2}, {0, 0}});
        CHECK(feedback_message(both, std::nullopt) ==
              "You are wrong. Agent (1,2) are colliding with each other. Please correct the "
              "current step.\n"
              "You are wrong. Agent 3 is colliding with obstacles. Please correct the "
              "current step.");
    }
    SUBCASE("continuity violations get their own sentence") {
        ValidationReport bad;
        bad.violations.push_back(IllegalMove{2, {0, 0}, {5, 5}});
        CHECK(feedback_message(bad, std::nullopt) ==
              "You are wrong. Agent 2 is making an invalid move. Please correct the current "
              "step.");
    }
}

TEST_CASE("parse_response_sbs finds the last well-formed block") {
    SUBCASE("the self-corrected transcript parses to the final block") {
        auto parsed = parse_response_sbs(testing::collision_response_full(), 2);
        REQUIRE(std::holds_alternative<JointConfig>(parsed));
        CHECK(std::get<JointConfig>(parsed) == JointConfig{{0, 1}, {0, 3}});
    }
    SUBCASE("the first half alone parses to the colliding block") {
        auto parsed = parse_response_sbs(testing::collision_response_part1(), 2);
        REQUIRE(std::holds_alternative<JointConfig>(parsed));
        CHECK(std::get<JointConfig>(parsed) == JointConfig{{1, 2}, {1, 2}});
    }
    SUBCASE("spacing variants are tolerated") {
        auto parsed = parse_response_sbs("Agent 1: (3, 4)\nagent 2: ( 5 , 6 )", 2);
        REQUIRE(std::holds_alternative<JointConfig>(parsed));
        CHECK(std::get<JointConfig>(parsed) == JointConfig{{3, 4}, {5, 6}});
    }
    SUBCASE("empty text") {
        auto parsed = parse_response_sbs("", 2);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
        CHECK(std::get<ParseError>(parsed).message == "no solution block found");
    }
    SUBCASE("missing agent in the final block") {
        auto parsed = parse_response_sbs("Agent 1: (0,0)\nAgent 3: (1,1)", 2);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
        CHECK(std::get<ParseError>(parsed).message.find("agent") != std::string::npos);
    }
    SUBCASE("duplicate agent in the final block") {
        auto parsed = parse_response_sbs("Agent 1: (0,0)\nAgent 1: (1,1)", 1);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
    }
}

TEST_CASE("parse_response_sbs round-trips format_solution_block") {
    std::mt19937 rng(53);
    std::uniform_int_distribution<int> coord(0, 30);
    std::uniform_int_distribution<int> agents(1, 9);
    for (int i = 0; i < 300; ++i) {
        int n = agents(rng);
        JointConfig cfg(n);
        for (Coord& c : cfg) c = {coord(rng), coord(rng)};
        auto parsed = parse_response_sbs(format_solution_block(cfg), n);
        REQUIRE(std::holds_alternative<JointConfig>(parsed));
        CHECK(std::get<JointConfig>(parsed) == cfg);
    }
}

TEST_CASE("parse_response_os reads step-labeled plans") {
    SUBCASE("well-formed two-step plan") {
        std::string text =
            "Here is the validated plan:\n\n"
            "Step 1:\nAgent 1: (0,1)\nAgent 2: (0,3)\n"
            "Step 2:\nAgent 1: (1,1)\nAgent 2: (1,3)";
        auto parsed = parse_response_os(text, 2);
        REQUIRE(std::holds_alternative<std::vector<JointConfig>>(parsed));
        auto& plan = std::get<std::vector<JointConfig>>(parsed);
        REQUIRE(plan.size() == 2);
        CHECK(plan[0] == JointConfig{{0, 1}, {0, 3}});
        CHECK(plan[1] == JointConfig{{1, 1}, {1, 3}});
    }
    SUBCASE("a later region supersedes reasoning text") {
        std::string text =
            "Step 1:\nAgent 1: (9,9)\nAgent 2: (9,8)\n"
            "Wait, that collides with the wall. Let me redo this.\n"
            "Step 1:\nAgent 1: (0,1)\nAgent 2: (0,3)";
        auto parsed = parse_response_os(text, 2);
        REQUIRE(std::holds_alternative<std::vector<JointConfig>>(parsed));
        CHECK(std::get<std::vector<JointConfig>>(parsed)[0] == JointConfig{{0, 1}, {0, 3}});
    }
    SUBCASE("step labels must count 1..T") {
        auto parsed = parse_response_os("Step 2:\nAgent 1: (0,0)", 1);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
    }
    SUBCASE("each step needs full coverage") {
        auto parsed = parse_response_os("Step 1:\nAgent 1: (0,0)", 2);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
    }
    SUBCASE("no plan at all") {
        auto parsed = parse_response_os("I cannot solve this.", 2);
        REQUIRE(std::holds_alternative<ParseError>(parsed));
    }
}

TEST_CASE("one-shot feedback names the failing step") {
    ValidationReport report;
    report.violations.push_back(VertexConflict{{1, 2}, {1, 2}});
    CHECK(os_failure_feedback(3, report) ==
          "You are wrong. In step 3: Agent (1,2) are colliding with each other. Please "
          "correct your plan and provide the complete plan again.");
    CHECK(os_goal_feedback().find("does not bring every agent") != std::string::npos);
    CHECK(os_length_feedback(14, 12).find("14 steps") != std::string::npos);
    CHECK(parse_failure_feedback(Mode::OS).find("complete corrected plan") !=
          std::string::npos);
    CHECK(parse_failure_feedback().find("current step") != std::string::npos);
}

}  // TEST_SUITE
