#include "mapf/grid.hpp"

#include <algorithm>
#include <unordered_set>

namespace mapf {

const char* action_name(Action a) {
    switch (a) {
        case Action::Stay: return "stay";
        case Action::Left: return "left";
        case Action::Right: return "right";
        case Action::Up: return "up";
        case Action::Down: return "down";
    }
    return "?";
}

Coord apply_action(Coord c, Action a) {
    switch (a) {
        case Action::Stay: return c;
        case Action::Left: return {c.x - 1, c.y};
        case Action::Right: return {c.x + 1, c.y};
        case Action::Up: return {c.x, c.y + 1};
        case Action::Down: return {c.x, c.y - 1};
    }
    return c;
}

Action opposite_action(Action a) {
    switch (a) {
        case Action::Stay: return Action::Stay;
        case Action::Left: return Action::Right;
        case Action::Right: return Action::Left;
        case Action::Up: return Action::Down;
        case Action::Down: return Action::Up;
    }
    return Action::Stay;
}

GridMap::GridMap(int width, int height, const std::vector<Coord>& obstacles,
                 std::string name)
    : width_(width), height_(height), name_(std::move(name)) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("GridMap: dimensions must be at least 1x1");
    blocked_.assign(static_cast<size_t>(width) * height, 0);
    for (const Coord& c : obstacles) {
        if (!in_bounds(c))
            throw std::invalid_argument("GridMap: obstacle " + to_string(c) +
                                        " out of bounds");
        if (!blocked_[index(c)]) {
            blocked_[index(c)] = 1;
            ++obstacle_count_;
        }
    }
}

std::vector<Coord> GridMap::obstacles() const {
    std::vector<Coord> out;
    out.reserve(obstacle_count_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (blocked_[y * width_ + x]) out.push_back({x, y});
    return out;
}

bool is_free(const GridMap& m, Coord c) { return m.in_bounds(c) && !m.is_obstacle(c); }

std::vector<std::pair<Action, Coord>> valid_actions(const GridMap& m, Coord c) {
    if (!is_free(m, c))
        throw std::invalid_argument("valid_actions: cell " + to_string(c) +
                                    " is not free");
    std::vector<std::pair<Action, Coord>> out;
    out.reserve(5);
    for (Action a : kActionOrder) {
        Coord target = apply_action(c, a);
        if (is_free(m, target)) out.emplace_back(a, target);
    }
    return out;
}

Instance::Instance(GridMap map, std::vector<Coord> starts, std::vector<Coord> goals)
    : map_(std::move(map)), starts_(std::move(starts)), goals_(std::move(goals)) {
    if (starts_.empty()) throw std::invalid_argument("Instance: no agents");
    if (starts_.size() != goals_.size())
        throw std::invalid_argument("Instance: starts/goals size mismatch");
    std::unordered_set<Coord, CoordHash> seen;
    for (size_t i = 0; i < starts_.size(); ++i) {
        if (!is_free(map_, starts_[i]))
            throw std::invalid_argument("Instance: start of agent " +
                                        std::to_string(i + 1) + " is not free");
        if (!is_free(map_, goals_[i]))
            throw std::invalid_argument("Instance: goal of agent " +
                                        std::to_string(i + 1) + " is not free");
        if (!seen.insert(starts_[i]).second)
            throw std::invalid_argument("Instance: duplicate start " +
                                        to_string(starts_[i]));
    }
    seen.clear();
    for (const Coord& g : goals_)
        if (!seen.insert(g).second)
            throw std::invalid_argument("Instance: duplicate goal " + to_string(g));
}

std::string to_string(Coord c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

}  // namespace mapf
