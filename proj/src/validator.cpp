#include "mapf/validator.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace mapf {

namespace {

bool adjacent_or_same(Coord a, Coord b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) <= 1;
}

std::string join_ids(const std::vector<int>& ids) {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ids[i]);
    }
    return out;
}

}  // namespace

std::string describe(const Violation& v) {
    if (const auto* oob = std::get_if<OutOfBounds>(&v))
        return "agent " + std::to_string(oob->agent) + " moves out of bounds to " +
               to_string(oob->cell);
    if (const auto* im = std::get_if<IllegalMove>(&v))
        return "agent " + std::to_string(im->agent) + " jumps from " + to_string(im->from) +
               " to " + to_string(im->to);
    if (const auto* oc = std::get_if<ObstacleCollision>(&v))
        return "agent " + join_ids(oc->agents) + " collides with an obstacle";
    const auto& vc = std::get<VertexConflict>(v);
    return "agents " + join_ids(vc.agents) + " collide at " + to_string(vc.cell);
}

std::vector<VertexConflict> ValidationReport::vertex_conflicts() const {
    std::vector<VertexConflict> out;
    for (const Violation& v : violations)
        if (const auto* vc = std::get_if<VertexConflict>(&v)) out.push_back(*vc);
    return out;
}

std::vector<int> ValidationReport::obstacle_agents() const {
    for (const Violation& v : violations)
        if (const auto* oc = std::get_if<ObstacleCollision>(&v)) return oc->agents;
    return {};
}

bool ValidationReport::has_invalid_moves() const {
    for (const Violation& v : violations)
        if (std::holds_alternative<OutOfBounds>(v) || std::holds_alternative<IllegalMove>(v))
            return true;
    return false;
}

std::vector<int> ValidationReport::invalid_move_agents() const {
    std::vector<int> ids;
    for (const Violation& v : violations) {
        if (const auto* oob = std::get_if<OutOfBounds>(&v)) ids.push_back(oob->agent);
        if (const auto* im = std::get_if<IllegalMove>(&v)) ids.push_back(im->agent);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

ValidationReport check_step(const GridMap& m, const JointConfig& current,
                            const JointConfig& proposed) {
    if (current.size() != proposed.size())
        throw std::invalid_argument("check_step: configuration sizes differ (" +
                                    std::to_string(current.size()) + " vs " +
                                    std::to_string(proposed.size()) + ")");
    const int n = static_cast<int>(current.size());

    ValidationReport report;
    std::vector<int> obstacle_ids;
    for (int i = 0; i < n; ++i) {
        const Coord from = current[i];
        const Coord to = proposed[i];
        if (!m.in_bounds(to)) {
            report.violations.push_back(OutOfBounds{i + 1, to});
        } else if (!adjacent_or_same(from, to)) {
            report.violations.push_back(IllegalMove{i + 1, from, to});
        } else if (m.is_obstacle(to)) {
            obstacle_ids.push_back(i + 1);
        }
    }
    // Emission order within the per-agent pass above is OutOfBounds and
    // IllegalMove interleaved by agent; re-sort into the report order.
    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const Violation& a, const Violation& b) {
                         return a.index() < b.index();
                     });
    if (!obstacle_ids.empty())
        report.violations.push_back(ObstacleCollision{std::move(obstacle_ids)});

    // Vertex conflicts group every cell proposed by two or more agents,
    // regardless of the cell's own legality.
    std::map<Coord, std::vector<int>, RowMajorLess> by_cell;
    for (int i = 0; i < n; ++i) by_cell[proposed[i]].push_back(i + 1);
    for (auto& [cell, ids] : by_cell)
        if (ids.size() >= 2) report.violations.push_back(VertexConflict{ids, cell});

    return report;
}

PlanReport check_plan(const Instance& inst, const std::vector<JointConfig>& plan) {
    if (plan.empty()) throw std::invalid_argument("check_plan: empty plan");
    for (const JointConfig& cfg : plan)
        if (static_cast<int>(cfg.size()) != inst.num_agents())
            throw std::invalid_argument("check_plan: config size does not match agent count");
    if (plan[0] != inst.starts())
        throw std::invalid_argument("check_plan: plan does not begin at the starts");

    PlanReport out;
    out.movement_valid = true;
    for (size_t t = 0; t + 1 < plan.size(); ++t) {
        ValidationReport r = check_step(inst.map(), plan[t], plan[t + 1]);
        if (!r.valid() && out.movement_valid) {
            out.movement_valid = false;
            out.first_invalid_step = static_cast<int>(t) + 1;
        }
        out.step_reports.push_back(std::move(r));
    }
    out.goals_reached = plan.back() == inst.goals();
    for (size_t t = 0; t < plan.size(); ++t) {
        if (at_goals(plan[t], inst.goals())) {
            out.makespan = static_cast<int>(t);
            break;
        }
    }
    return out;
}

bool at_goals(const JointConfig& positions, const std::vector<Coord>& goals) {
    return positions == goals;
}

}  // namespace mapf
