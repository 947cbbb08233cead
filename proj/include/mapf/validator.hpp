#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

// Positions of all agents at one timestep; index i holds agent i+1.
using JointConfig = std::vector<Coord>;

struct OutOfBounds {
    int agent = 0;
    Coord cell;
    friend bool operator==(const OutOfBounds&, const OutOfBounds&) = default;
};

struct IllegalMove {
    int agent = 0;
    Coord from;
    Coord to;
    friend bool operator==(const IllegalMove&, const IllegalMove&) = default;
};

// All agents whose proposed cell is an obstacle, reported together (feedback
// names them in one sentence). Ids ascending.
struct ObstacleCollision {
    std::vector<int> agents;
    friend bool operator==(const ObstacleCollision&, const ObstacleCollision&) = default;
};

// One maximal group of >= 2 agents proposing the same cell. Ids ascending.
struct VertexConflict {
    std::vector<int> agents;
    Coord cell;
    friend bool operator==(const VertexConflict&, const VertexConflict&) = default;
};

using Violation = std::variant<OutOfBounds, IllegalMove, ObstacleCollision, VertexConflict>;

std::string describe(const Violation& v);

// Violations in deterministic order: OutOfBounds, IllegalMove,
// ObstacleCollision, VertexConflict; within a kind ascending by agent id
// (vertex conflicts: row-major by cell).
struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }

    std::vector<VertexConflict> vertex_conflicts() const;
    std::vector<int> obstacle_agents() const;
    bool has_invalid_moves() const;  // any OutOfBounds or IllegalMove
    std::vector<int> invalid_move_agents() const;
};

// Single-step rules, per agent and per cell:
//   - OutOfBounds if the proposed cell is outside the map;
//   - otherwise IllegalMove if it is neither the current cell nor 4-adjacent
//     to it;
//   - otherwise ObstacleCollision if it is an obstacle.
// Independently, every cell proposed by >= 2 agents yields one
// VertexConflict. Swap moves are legal: only same-cell-after-move collisions
// count. Throws std::invalid_argument on a length mismatch.
ValidationReport check_step(const GridMap& m, const JointConfig& current,
                            const JointConfig& proposed);

struct PlanReport {
    // step_reports[i] covers the transition from config i to config i+1,
    // user-visibly "step i+1".
    std::vector<ValidationReport> step_reports;
    bool movement_valid = false;
    bool goals_reached = false;                // final config equals goals
    std::optional<int> makespan;               // first config with every agent at its goal
    std::optional<int> first_invalid_step;     // 1-based, when !movement_valid
    bool valid() const { return movement_valid; }
};

// Validates every consecutive pair of configs. Preconditions (throwing
// std::invalid_argument): plan non-empty, config sizes match the instance,
// plan[0] equals the starts.
PlanReport check_plan(const Instance& inst, const std::vector<JointConfig>& plan);

bool at_goals(const JointConfig& positions, const std::vector<Coord>& goals);

}  // namespace mapf
