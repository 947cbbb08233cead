#include "mapf/search.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

namespace mapf {

namespace {

const Action kMoves[] = {Action::Stay, Action::Left, Action::Right, Action::Up,
                         Action::Down};

// Vertex reservations from higher-priority agents: exact (cell, t) pairs
// plus "goal parked from time T onward".
class ReservationTable {
public:
    explicit ReservationTable(const GridMap& m)
        : cell_count_(m.cell_count()),
          parked_from_(static_cast<size_t>(m.cell_count()), kNever),
          last_transient_(static_cast<size_t>(m.cell_count()), -1) {}

    void reserve_path(const GridMap& m, const std::vector<Coord>& path) {
        for (size_t t = 0; t < path.size(); ++t) {
            int idx = m.index(path[t]);
            cells_.insert(key(idx, static_cast<int>(t)));
            last_transient_[idx] = std::max(last_transient_[idx], static_cast<int>(t));
        }
        int goal_idx = m.index(path.back());
        int from = static_cast<int>(path.size()) - 1;
        if (parked_from_[goal_idx] == kNever || from < parked_from_[goal_idx])
            parked_from_[goal_idx] = from;
    }

    bool blocked(const GridMap& m, Coord c, int t) const {
        int idx = m.index(c);
        if (cells_.count(key(idx, t))) return true;
        return parked_from_[idx] != kNever && t >= parked_from_[idx];
    }

    // True when the cell stays free for every time >= t.
    bool free_forever(const GridMap& m, Coord c, int t) const {
        int idx = m.index(c);
        if (parked_from_[idx] != kNever && t >= parked_from_[idx]) return false;
        return t > last_transient_[idx];
    }

private:
    static constexpr int kNever = -1;

    int64_t key(int cell_index, int t) const {
        return static_cast<int64_t>(t) * cell_count_ + cell_index;
    }

    int cell_count_;
    std::unordered_set<int64_t> cells_;
    std::vector<int> parked_from_;
    std::vector<int> last_transient_;
};

struct AStarNode {
    Coord cell;
    int t = 0;
    int f = 0;
    int parent = -1;  // index into the node pool
};

std::optional<std::vector<Coord>> space_time_astar(const GridMap& m, Coord start,
                                                   Coord goal, const ReservationTable& rt,
                                                   const DistanceField& to_goal,
                                                   int horizon) {
    if (!to_goal.reachable(start)) return std::nullopt;

    struct QueueEntry {
        int f;
        int t;
        int node;
        bool operator>(const QueueEntry& o) const {
            if (f != o.f) return f > o.f;
            return t < o.t;  // deeper nodes first on ties: reach the goal sooner
        }
    };

    std::vector<AStarNode> pool;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
    std::unordered_set<int64_t> closed;
    auto state_key = [&](Coord c, int t) {
        return (static_cast<int64_t>(t) << 24) | (static_cast<int64_t>(c.y) << 12) | c.x;
    };

    pool.push_back({start, 0, to_goal.at(start), -1});
    open.push({pool[0].f, 0, 0});

    while (!open.empty()) {
        QueueEntry top = open.top();
        open.pop();
        AStarNode node = pool[top.node];
        if (!closed.insert(state_key(node.cell, node.t)).second) continue;

        if (node.cell == goal && rt.free_forever(m, goal, node.t)) {
            std::vector<Coord> path(node.t + 1);
            for (int i = top.node; i != -1; i = pool[i].parent) path[pool[i].t] = pool[i].cell;
            return path;
        }
        if (node.t >= horizon) continue;

        for (Action a : kMoves) {
            Coord next = apply_action(node.cell, a);
            if (!is_free(m, next)) continue;
            if (rt.blocked(m, next, node.t + 1)) continue;
            if (!to_goal.reachable(next)) continue;
            if (closed.count(state_key(next, node.t + 1))) continue;
            int f = node.t + 1 + to_goal.at(next);
            if (f > horizon) continue;
            pool.push_back({next, node.t + 1, f, top.node});
            open.push({f, node.t + 1, static_cast<int>(pool.size()) - 1});
        }
    }
    return std::nullopt;
}

}  // namespace

DistanceField bfs_distances(const GridMap& m, Coord source) {
    if (!is_free(m, source))
        throw std::invalid_argument("bfs_distances: source " + to_string(source) +
                                    " is blocked");
    DistanceField field(m.width(), m.height());
    field.set(source, 0);
    std::queue<Coord> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
        Coord c = frontier.front();
        frontier.pop();
        int d = field.at(c);
        for (Action a : {Action::Left, Action::Right, Action::Up, Action::Down}) {
            Coord next = apply_action(c, a);
            if (is_free(m, next) && !field.reachable(next)) {
                field.set(next, d + 1);
                frontier.push(next);
            }
        }
    }
    return field;
}

int makespan_lower_bound(const Instance& inst) {
    int bound = 0;
    for (int i = 0; i < inst.num_agents(); ++i) {
        DistanceField field = bfs_distances(inst.map(), inst.goals()[i]);
        int d = field.at(inst.starts()[i]);
        if (d == DistanceField::kUnreachable)
            throw std::runtime_error("makespan_lower_bound: goal of agent " +
                                     std::to_string(i + 1) + " is unreachable");
        bound = std::max(bound, d);
    }
    return bound;
}

std::optional<Plan> prioritized_plan(const Instance& inst, const std::vector<int>& order) {
    const int n = inst.num_agents();
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("prioritized_plan: order size mismatch");

    int lower_bound = makespan_lower_bound(inst);
    int horizon = lower_bound + inst.map().width() * inst.map().height();

    ReservationTable rt(inst.map());
    std::vector<std::vector<Coord>> paths(n);
    for (int agent : order) {
        DistanceField to_goal = bfs_distances(inst.map(), inst.goals()[agent]);
        auto path = space_time_astar(inst.map(), inst.starts()[agent], inst.goals()[agent],
                                     rt, to_goal, horizon);
        if (!path) return std::nullopt;
        rt.reserve_path(inst.map(), *path);
        paths[agent] = std::move(*path);
    }

    size_t makespan = 0;
    for (const auto& p : paths) makespan = std::max(makespan, p.size() - 1);
    Plan plan;
    plan.steps.resize(makespan + 1);
    for (size_t t = 0; t <= makespan; ++t) {
        plan.steps[t].resize(n);
        for (int i = 0; i < n; ++i)
            plan.steps[t][i] = paths[i][std::min(t, paths[i].size() - 1)];
    }
    return plan;
}

std::optional<Plan> prioritized_plan(const Instance& inst) {
    std::vector<int> order(inst.num_agents());
    std::iota(order.begin(), order.end(), 0);
    return prioritized_plan(inst, order);
}

std::optional<Plan> prioritized_plan_restarts(const Instance& inst, int extra_attempts,
                                              uint32_t seed) {
    std::vector<int> order(inst.num_agents());
    std::iota(order.begin(), order.end(), 0);
    if (auto plan = prioritized_plan(inst, order)) return plan;
    std::mt19937 rng(seed);
    for (int attempt = 0; attempt < extra_attempts; ++attempt) {
        std::shuffle(order.begin(), order.end(), rng);
        if (auto plan = prioritized_plan(inst, order)) return plan;
    }
    return std::nullopt;
}

bool joint_optimal_applicable(const Instance& inst) {
    return inst.num_agents() <= kJointOptimalMaxAgents &&
           inst.map().cell_count() <= kJointOptimalMaxCells;
}

std::optional<int> joint_optimal(const Instance& inst) {
    if (!joint_optimal_applicable(inst))
        throw std::invalid_argument("joint_optimal: instance exceeds the size guard (n <= " +
                                    std::to_string(kJointOptimalMaxAgents) + ", cells <= " +
                                    std::to_string(kJointOptimalMaxCells) + ")");
    const GridMap& m = inst.map();
    const int n = inst.num_agents();
    const int cells = m.cell_count();

    auto encode = [&](const JointConfig& cfg) {
        uint64_t key = 0;
        for (const Coord& c : cfg) key = key * cells + m.index(c);
        return key;
    };
    uint64_t space = 1;
    for (int i = 0; i < n; ++i) space *= cells;

    JointConfig start = inst.starts();
    const JointConfig& goals = inst.goals();
    std::vector<int8_t> visited(space, 0);
    std::queue<std::pair<JointConfig, int>> frontier;
    visited[encode(start)] = 1;
    frontier.push({start, 0});

    while (!frontier.empty()) {
        auto [cfg, depth] = frontier.front();
        frontier.pop();
        if (cfg == goals) return depth;

        // Cartesian product of per-agent moves, pruned on vertex conflicts.
        std::vector<std::vector<Coord>> moves(n);
        for (int i = 0; i < n; ++i)
            for (const auto& [a, target] : valid_actions(m, cfg[i])) moves[i].push_back(target);

        std::vector<size_t> pick(n, 0);
        JointConfig next(n);
        while (true) {
            bool conflict = false;
            for (int i = 0; i < n && !conflict; ++i) {
                next[i] = moves[i][pick[i]];
                for (int j = 0; j < i; ++j)
                    if (next[j] == next[i]) {
                        conflict = true;
                        break;
                    }
            }
            if (!conflict) {
                uint64_t key = encode(next);
                if (!visited[key]) {
                    visited[key] = 1;
                    frontier.push({next, depth + 1});
                }
            }
            int i = n - 1;
            while (i >= 0 && ++pick[i] == moves[i].size()) pick[i--] = 0;
            if (i < 0) break;
        }
    }
    return std::nullopt;
}

std::string format_plan(const std::vector<JointConfig>& steps) {
    std::ostringstream out;
    for (size_t t = 0; t < steps.size(); ++t) {
        out << t << ":";
        for (const Coord& c : steps[t]) out << " " << to_string(c);
        out << "\n";
    }
    return out.str();
}

std::vector<JointConfig> parse_plan_text(const std::string& text) {
    std::vector<JointConfig> steps;
    std::istringstream in(text);
    std::string line;
    size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        size_t t = 0;
        char colon = 0;
        if (!(ls >> t >> colon) || colon != ':')
            throw std::runtime_error("plan text: bad step header in '" + line + "'");
        if (t != steps.size())
            throw std::runtime_error("plan text: steps out of order at t=" + std::to_string(t));
        JointConfig cfg;
        std::string tok;
        while (ls >> tok) {
            int x = 0, y = 0;
            if (sscanf(tok.c_str(), "(%d,%d)", &x, &y) != 2)
                throw std::runtime_error("plan text: bad coordinate '" + tok + "'");
            cfg.push_back({x, y});
        }
        if (cfg.empty()) throw std::runtime_error("plan text: step with no coordinates");
        if (steps.empty())
            expected = cfg.size();
        else if (cfg.size() != expected)
            throw std::runtime_error("plan text: agent count changes at t=" + std::to_string(t));
        steps.push_back(std::move(cfg));
    }
    if (steps.empty()) throw std::runtime_error("plan text: no steps found");
    return steps;
}

}  // namespace mapf
