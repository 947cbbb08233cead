#pragma once

#include <random>
#include <string>
#include <vector>

#include "mapf/bench_io.hpp"
#include "mapf/grid.hpp"
#include "mapf/validator.hpp"

namespace mapf::testing {

// The 4x4 two-agent symmetry instance used throughout the tests: obstacles
// at (3,2) and (1,0), agent 1 (0,2)->(3,1), agent 2 (1,3)->(2,0). Waiting
// once is optimal (makespan 5); the left detour costs 6.
inline GridMap symmetry_map() {
    return GridMap(4, 4, {{3, 2}, {1, 0}}, "demo-4-4");
}

inline Instance symmetry_instance() {
    return Instance(symmetry_map(), {{0, 2}, {1, 3}}, {{3, 1}, {2, 0}});
}

inline const char* symmetry_map_text() {
    return "type octile\nheight 4\nwidth 4\nmap\n....\n...@\n....\n.@..\n";
}

// The left-detour continuation after step 1 = {(0,1),(0,3)}: agent 1 runs
// along y=1, agent 2 backtracks along the top and down column 2.
inline std::vector<JointConfig> detour_plan() {
    return {
        {{0, 2}, {1, 3}},
        {{0, 1}, {0, 3}},
        {{1, 1}, {1, 3}},
        {{2, 1}, {2, 3}},
        {{3, 1}, {2, 2}},
        {{3, 1}, {2, 1}},
        {{3, 1}, {2, 0}},
    };
}

// Transcript of the model output for the symmetry instance: a colliding
// first attempt, self-correction, and the validated block. Split where the
// regeneration begins so the two halves can be scripted as separate replies.
inline std::string collision_response_part1() {
    return "Step 1: \n"
           "Agent 1: \n"
           "Current: (0,2) \n"
           "Goal: (3,1) \n"
           "Move: Right to (1,2) \n"
           "\n"
           "Agent 2: \n"
           "Current: (1,3) \n"
           "Goal: (2,0) \n"
           "Move: Down to (1,2) \n"
           "\n"
           "After the move, the coordinates of the agents are: \n"
           "Agent 1: (1,2) \n"
           "Agent 2: (1,2) \n"
           "\n"
           "There is a collision between Agent 1 and Agent 2. I will regenerate another "
           "solution immediately. \n";
}

inline std::string collision_response_part2() {
    return "Step 1 (Regenerated): \n"
           "Agent 1: \n"
           "Current: (0,2) \n"
           "Goal: (3,1) \n"
           "Move: Down to (0,1) \n"
           "\n"
           "Agent 2: \n"
           "Current: (1,3) \n"
           "Goal: (2,0) \n"
           "Move: Left to (0,3) \n"
           "\n"
           "After the move, the coordinates of the agents are: \n"
           "Agent 1: (0,1) \n"
           "Agent 2: (0,3) \n"
           "\n"
           "There is no collision. Here is the validated solution: \n"
           "\n"
           "Agent 1: (0,1) \n"
           "Agent 2: (0,3)";
}

inline std::string collision_response_full() {
    return collision_response_part1() + "\n" + collision_response_part2();
}

// Scripted continuation finishing the run after the corrected first step,
// following detour_plan() steps 2..6.
inline std::vector<std::string> detour_continuation_responses() {
    std::vector<std::string> out;
    auto plan = detour_plan();
    for (size_t t = 2; t < plan.size(); ++t) {
        std::string block;
        for (size_t i = 0; i < plan[t].size(); ++i) {
            if (i) block += "\n";
            block += "Agent " + std::to_string(i + 1) + ": " + to_string(plan[t][i]);
        }
        out.push_back(block);
    }
    return out;
}

inline std::string source_path(const std::string& relative) {
    return std::string(MAPF_SOURCE_DIR) + "/" + relative;
}

inline std::string golden_path(const std::string& name) {
    return source_path("tests/golden/" + name);
}

inline std::string data_path(const std::string& relative) {
    return source_path("data/" + relative);
}

// Golden files end with a single trailing newline on disk; builders emit
// none. Strip exactly one.
inline std::string read_golden(const std::string& name) {
    std::string text = read_file(golden_path(name));
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

}  // namespace mapf::testing
