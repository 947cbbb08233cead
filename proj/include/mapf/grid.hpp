#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mapf {

// Cell coordinate. x grows rightward, y grows upward; (0,0) is the
// bottom-left cell of a map. File formats that count rows from the top are
// converted on ingestion (see bench_io).
struct Coord {
    int x = 0;
    int y = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Row-major ordering (ascending y, then x). Used wherever cell lists must be
// deterministic: obstacle listings, violation ordering.
struct RowMajorLess {
    bool operator()(const Coord& a, const Coord& b) const {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    }
};

struct CoordHash {
    size_t operator()(const Coord& c) const {
        return std::hash<int64_t>()((static_cast<int64_t>(c.y) << 32) ^
                                    static_cast<uint32_t>(c.x));
    }
};

enum class Action : uint8_t { Stay, Left, Right, Up, Down };

// Canonical enumeration order. Frozen: prompt text depends on it.
inline constexpr Action kActionOrder[] = {Action::Stay, Action::Left, Action::Right,
                                          Action::Up, Action::Down};

// Lower-case names as they appear in single-step observation lines.
const char* action_name(Action a);

// Pure coordinate arithmetic; no bounds check. Callers validate targets.
Coord apply_action(Coord c, Action a);

Action opposite_action(Action a);

class GridMap {
public:
    GridMap() = default;
    // Throws std::invalid_argument on non-positive dimensions or an obstacle
    // outside the map.
    GridMap(int width, int height, const std::vector<Coord>& obstacles = {},
            std::string name = "");

    int width() const { return width_; }
    int height() const { return height_; }
    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    bool in_bounds(Coord c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }
    bool is_obstacle(Coord c) const { return blocked_[index(c)]; }

    int obstacle_count() const { return obstacle_count_; }
    // Obstacles in row-major order (ascending y, then x).
    std::vector<Coord> obstacles() const;

    int index(Coord c) const { return c.y * width_ + c.x; }
    int cell_count() const { return width_ * height_; }

    // Name is a label, not part of map identity (it does not survive an
    // ASCII round trip).
    friend bool operator==(const GridMap& a, const GridMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.blocked_ == b.blocked_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::string name_;
    std::vector<uint8_t> blocked_;
    int obstacle_count_ = 0;
};

// True iff c is in bounds and not an obstacle.
bool is_free(const GridMap& m, Coord c);

// The subset of kActionOrder whose target cell is free, with targets.
// Stay is always first. Ignores other agents by design: availability depends
// on obstacles only. Throws std::invalid_argument if c itself is not free.
std::vector<std::pair<Action, Coord>> valid_actions(const GridMap& m, Coord c);

// One MAPF problem: a map plus per-agent start and goal cells. Agent ids are
// 1-based everywhere user-visible; index i holds agent i+1.
class Instance {
public:
    // Validates: same number of starts and goals, at least one agent, every
    // endpoint free, starts pairwise distinct, goals pairwise distinct.
    Instance(GridMap map, std::vector<Coord> starts, std::vector<Coord> goals);

    const GridMap& map() const { return map_; }
    int num_agents() const { return static_cast<int>(starts_.size()); }
    const std::vector<Coord>& starts() const { return starts_; }
    const std::vector<Coord>& goals() const { return goals_; }

private:
    GridMap map_;
    std::vector<Coord> starts_;
    std::vector<Coord> goals_;
};

std::string to_string(Coord c);  // "(x,y)" -- the tight style of scenario lines

}  // namespace mapf
