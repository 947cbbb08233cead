#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/validator.hpp"

namespace mapf {

// Exact 4-connected shortest distances over free cells from one source.
class DistanceField {
public:
    static constexpr int kUnreachable = -1;

    DistanceField(int width, int height) : width_(width), height_(height) {
        d_.assign(static_cast<size_t>(width) * height, kUnreachable);
    }

    int at(Coord c) const { return d_[static_cast<size_t>(c.y) * width_ + c.x]; }
    bool reachable(Coord c) const { return at(c) != kUnreachable; }
    void set(Coord c, int v) { d_[static_cast<size_t>(c.y) * width_ + c.x] = v; }
    int width() const { return width_; }
    int height() const { return height_; }

private:
    int width_;
    int height_;
    std::vector<int> d_;
};

// Throws std::invalid_argument if the source is blocked.
DistanceField bfs_distances(const GridMap& m, Coord source);

// Max over agents of the single-agent shortest-path length. A valid lower
// bound on the optimal makespan; also the makespan-ratio normalizer.
// Throws std::runtime_error if any agent's goal is unreachable.
int makespan_lower_bound(const Instance& inst);

struct Plan {
    std::vector<JointConfig> steps;  // steps[0] = starts
    int makespan() const { return static_cast<int>(steps.size()) - 1; }
};

// Plans agents one at a time in the given order (0-based agent indices) with
// space-time A* over (cell, time). Earlier agents' trajectories are vertex
// reservations; a finished agent reserves its goal cell for all later times.
// Swaps are not constrained, matching the validator. Returns nullopt when an
// agent finds no path within a horizon of lower_bound + width*height.
std::optional<Plan> prioritized_plan(const Instance& inst, const std::vector<int>& order);
std::optional<Plan> prioritized_plan(const Instance& inst);  // identity order

// Identity order first, then `extra_attempts` shuffled orders (seeded).
std::optional<Plan> prioritized_plan_restarts(const Instance& inst, int extra_attempts,
                                              uint32_t seed);

// Exact minimum makespan by breadth-first search over joint configurations
// under validator semantics. Guarded to n <= 3 agents and <= 64 cells
// (std::invalid_argument beyond); nullopt when the goal configuration is
// unreachable.
std::optional<int> joint_optimal(const Instance& inst);

inline constexpr int kJointOptimalMaxAgents = 3;
inline constexpr int kJointOptimalMaxCells = 64;

bool joint_optimal_applicable(const Instance& inst);

// Line-per-step text form "t: (x1,y1) (x2,y2) ...".
std::string format_plan(const std::vector<JointConfig>& steps);
std::vector<JointConfig> parse_plan_text(const std::string& text);

}  // namespace mapf
