#include <doctest.h>

#include <random>

#include "mapf/serialize.hpp"
#include "mapf/validator.hpp"
#include "support/fixtures.hpp"
#include "support/naive_checker.hpp"

using namespace mapf;

TEST_SUITE("validator") {

TEST_CASE("check_step detects vertex conflicts") {
    GridMap m = testing::symmetry_map();
    auto report = check_step(m, {{0, 2}, {1, 3}}, {{1, 2}, {1, 2}});
    REQUIRE(report.violations.size() == 1);
    auto vc = std::get<VertexConflict>(report.violations[0]);
    CHECK(vc.agents == std::vector<int>{1, 2});
    CHECK(vc.cell == Coord{1, 2});
}

TEST_CASE("check_step accepts the corrected step") {
    GridMap m = testing::symmetry_map();
    CHECK(check_step(m, {{0, 2}, {1, 3}}, {{0, 1}, {0, 3}}).valid());
}

TEST_CASE("check_step detects obstacle collisions") {
    GridMap m = testing::symmetry_map();
    auto report = check_step(m, {{2, 2}}, {{3, 2}});
    REQUIRE(report.violations.size() == 1);
    CHECK(std::get<ObstacleCollision>(report.violations[0]).agents == std::vector<int>{1});
}

TEST_CASE("check_step detects jumps and out-of-bounds moves") {
    GridMap m(8, 8);
    auto jump = check_step(m, {{0, 0}}, {{2, 0}});
    REQUIRE(jump.violations.size() == 1);
    auto im = std::get<IllegalMove>(jump.violations[0]);
    CHECK(im.agent == 1);
    CHECK(im.from == Coord{0, 0});
    CHECK(im.to == Coord{2, 0});

    auto oob = check_step(m, {{0, 0}}, {{0, -1}});
    REQUIRE(oob.violations.size() == 1);
    CHECK(std::get<OutOfBounds>(oob.violations[0]).cell == Coord{0, -1});
}

TEST_CASE("swap moves are legal") {
    GridMap m(4, 1);
    CHECK(check_step(m, {{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}).valid());
}

TEST_CASE("all-Stay on a valid standing configuration is always legal") {
    std::mt19937 rng(23);
    for (int i = 0; i < 200; ++i) {
        auto c = testing::random_step_case(rng);
        CHECK(check_step(c.map, c.current, c.current).valid());
    }
}

TEST_CASE("violations come in a fixed order") {
    GridMap m = testing::symmetry_map();
    // agent 1 jumps out of bounds, agent 2 jumps in bounds, agent 3 hits the
    // obstacle, agents 4+5 collide
    JointConfig current = {{0, 0}, {0, 1}, {2, 2}, {2, 1}, {2, 3}};
    JointConfig proposed = {{8, 8}, {2, 3}, {3, 2}, {2, 2}, {2, 2}};
    auto report = check_step(m, current, proposed);
    REQUIRE(report.violations.size() == 4);
    CHECK(std::holds_alternative<OutOfBounds>(report.violations[0]));
    CHECK(std::holds_alternative<IllegalMove>(report.violations[1]));
    CHECK(std::holds_alternative<ObstacleCollision>(report.violations[2]));
    CHECK(std::holds_alternative<VertexConflict>(report.violations[3]));
    CHECK(std::get<VertexConflict>(report.violations[3]).agents == std::vector<int>{4, 5});
}

TEST_CASE("reports are deterministic") {
    std::mt19937 rng(29);
    for (int i = 0; i < 100; ++i) {
        auto c = testing::random_step_case(rng);
        auto a = check_step(c.map, c.current, c.proposed);
        auto b = check_step(c.map, c.current, c.proposed);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }
}

TEST_CASE("check_step rejects mismatched configuration sizes") {
    GridMap m(4, 4);
    CHECK_THROWS_AS(check_step(m, {{0, 0}}, {{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("check_step matches the brute-force checker") {
    std::mt19937 rng(31);
    int vertex_seen = 0, obstacle_seen = 0, oob_seen = 0, illegal_seen = 0;
    for (int i = 0; i < 500; ++i) {
        auto c = testing::random_step_case(rng);
        auto report = check_step(c.map, c.current, c.proposed);
        CHECK(testing::canonicalize(report) ==
              testing::naive_check_step(c.map, c.current, c.proposed));
        for (const Violation& v : report.violations) {
            if (std::holds_alternative<VertexConflict>(v)) ++vertex_seen;
            if (std::holds_alternative<ObstacleCollision>(v)) ++obstacle_seen;
            if (std::holds_alternative<OutOfBounds>(v)) ++oob_seen;
            if (std::holds_alternative<IllegalMove>(v)) ++illegal_seen;
        }
    }
    // the generator must actually exercise every violation kind
    CHECK(vertex_seen > 0);
    CHECK(obstacle_seen > 0);
    CHECK(oob_seen > 0);
    CHECK(illegal_seen > 0);
}

TEST_CASE("check_plan validates consecutive pairs and finds the makespan") {
    Instance inst = testing::symmetry_instance();

    SUBCASE("standing start equal to goals") {
        GridMap m(4, 4);
        Instance done(m, {{1, 1}, {2, 2}}, {{1, 1}, {2, 2}});
        auto report = check_plan(done, {{{1, 1}, {2, 2}}});
        CHECK(report.valid());
        CHECK(report.goals_reached);
        CHECK(report.makespan == 0);
    }
    SUBCASE("the detour plan is valid with makespan 6") {
        auto report = check_plan(inst, testing::detour_plan());
        CHECK(report.valid());
        CHECK(report.goals_reached);
        CHECK(report.makespan == 6);
    }
    SUBCASE("a spliced collision is caught at its step") {
        auto plan = testing::detour_plan();
        plan[3] = {{1, 2}, {1, 2}};  // both agents into (1,2) at step 3
        auto report = check_plan(inst, plan);
        CHECK_FALSE(report.valid());
        CHECK(report.first_invalid_step == 3);
        bool found = false;
        for (const Violation& v : report.step_reports[2].violations)
            if (auto* vc = std::get_if<VertexConflict>(&v))
                found = vc->cell == Coord{1, 2};
        CHECK(found);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(check_plan(inst, {}), std::invalid_argument);
        CHECK_THROWS_AS(check_plan(inst, {{{0, 0}, {1, 3}}}), std::invalid_argument);
        CHECK_THROWS_AS(check_plan(inst, {{{0, 2}}}), std::invalid_argument);
    }
}

}  // TEST_SUITE
