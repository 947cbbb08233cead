#pragma once

// Brute-force single-step checker, kept deliberately dumb and separate from
// the library implementation: per-agent scans plus an O(n^2) all-pairs
// comparison. Used as the equivalence oracle for check_step.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/validator.hpp"

namespace mapf::testing {

// Violations canonicalized to strings so set equality is trivial to state.
inline std::multiset<std::string> naive_check_step(const GridMap& m,
                                                   const JointConfig& current,
                                                   const JointConfig& proposed) {
    std::multiset<std::string> out;
    const int n = static_cast<int>(current.size());

    std::vector<int> obstacle_agents;
    for (int i = 0; i < n; ++i) {
        Coord from = current[i];
        Coord to = proposed[i];
        bool in_bounds = to.x >= 0 && to.y >= 0 && to.x < m.width() && to.y < m.height();
        if (!in_bounds) {
            std::ostringstream s;
            s << "oob a" << i + 1 << " " << to.x << "," << to.y;
            out.insert(s.str());
            continue;
        }
        int manhattan = std::abs(from.x - to.x) + std::abs(from.y - to.y);
        if (manhattan > 1) {
            std::ostringstream s;
            s << "illegal a" << i + 1 << " " << from.x << "," << from.y << "->" << to.x << ","
              << to.y;
            out.insert(s.str());
            continue;
        }
        if (m.is_obstacle(to)) obstacle_agents.push_back(i + 1);
    }
    if (!obstacle_agents.empty()) {
        std::ostringstream s;
        s << "obstacle";
        for (int a : obstacle_agents) s << " a" << a;
        out.insert(s.str());
    }

    // All pairs; a conflict cell's group is the set of agents on it.
    std::set<Coord> conflict_cells;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (proposed[i] == proposed[j]) conflict_cells.insert(proposed[i]);
    for (const Coord& cell : conflict_cells) {
        std::ostringstream s;
        s << "vertex " << cell.x << "," << cell.y;
        for (int i = 0; i < n; ++i)
            if (proposed[i] == cell) s << " a" << i + 1;
        out.insert(s.str());
    }
    return out;
}

// The library report rendered into the same canonical strings.
inline std::multiset<std::string> canonicalize(const ValidationReport& report) {
    std::multiset<std::string> out;
    for (const Violation& v : report.violations) {
        std::ostringstream s;
        if (const auto* oob = std::get_if<OutOfBounds>(&v)) {
            s << "oob a" << oob->agent << " " << oob->cell.x << "," << oob->cell.y;
        } else if (const auto* im = std::get_if<IllegalMove>(&v)) {
            s << "illegal a" << im->agent << " " << im->from.x << "," << im->from.y << "->"
              << im->to.x << "," << im->to.y;
        } else if (const auto* oc = std::get_if<ObstacleCollision>(&v)) {
            s << "obstacle";
            for (int a : oc->agents) s << " a" << a;
        } else {
            const auto& vc = std::get<VertexConflict>(v);
            s << "vertex " << vc.cell.x << "," << vc.cell.y;
            for (int a : vc.agents) s << " a" << a;
        }
        out.insert(s.str());
    }
    return out;
}

struct RandomStepCase {
    GridMap map;
    JointConfig current;
    JointConfig proposed;
};

// Random map <= 8x8 with obstacle density <= 30%, a conflict-free standing
// configuration, and proposals mixing honest moves, jumps, swaps and
// deliberate same-cell picks.
inline RandomStepCase random_step_case(std::mt19937& rng) {
    std::uniform_int_distribution<int> dim(2, 8);
    int w = dim(rng), h = dim(rng);
    std::uniform_real_distribution<double> density(0.0, 0.30);
    double p = density(rng);
    std::bernoulli_distribution obstacle(p);

    std::vector<Coord> obstacles, free_cells;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            (obstacle(rng) ? obstacles : free_cells).push_back({x, y});
    if (free_cells.empty()) {
        free_cells.push_back(obstacles.back());
        obstacles.pop_back();
    }
    GridMap map(w, h, obstacles);

    std::shuffle(free_cells.begin(), free_cells.end(), rng);
    int n = std::min<int>(std::uniform_int_distribution<int>(1, 4)(rng),
                          static_cast<int>(free_cells.size()));
    JointConfig current(free_cells.begin(), free_cells.begin() + n);

    JointConfig proposed(n);
    std::uniform_int_distribution<int> style(0, 9);
    std::uniform_int_distribution<int> any_x(-1, w), any_y(-1, h);
    std::uniform_int_distribution<int> action(0, 4);
    for (int i = 0; i < n; ++i) {
        int s = style(rng);
        if (s < 5) {  // an adjacent-or-stay move, target legality not guaranteed
            proposed[i] = apply_action(current[i], kActionOrder[action(rng)]);
        } else if (s < 7 && i > 0) {  // pile onto another agent's proposal
            proposed[i] = proposed[std::uniform_int_distribution<int>(0, i - 1)(rng)];
        } else if (s < 9) {  // arbitrary cell: jumps, obstacles, bounds
            proposed[i] = {any_x(rng), any_y(rng)};
        } else {  // attempt a swap with a neighbor
            proposed[i] = current[(i + 1) % n];
        }
    }
    return {std::move(map), std::move(current), std::move(proposed)};
}

}  // namespace mapf::testing
