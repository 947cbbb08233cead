#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/image.hpp"

namespace mapf {

struct MapFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScenFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One line of a benchmark scenario file, with coordinates already converted
// to the internal bottom-left frame.
struct ScenEntry {
    int bucket = 0;
    std::string map_name;
    int map_width = 0;
    int map_height = 0;
    Coord start;
    Coord goal;
    double optimal_single_agent_distance = 0.0;
};

// Benchmark map format: header lines (type/height/width/map) followed by
// `height` rows of `width` characters. '.' and 'G' are free; '@', 'O', 'T'
// are obstacles. File row 0 is the top of the map (internal y = height-1).
GridMap parse_map(const std::string& text, const std::string& name = "");

// Scenario format: a "version ..." line, then 9 tab-separated fields per
// line: bucket, map, width, height, start col, start row, goal col, goal
// row, optimal distance. Rows count from the top; converted to internal
// coordinates via y = height-1-row. Entries are validated against `map`
// (bounds, not on an obstacle, dimensions match).
std::vector<ScenEntry> parse_scen(const std::string& text, const GridMap& map);

// The first n entries become agents 1..n, in file order.
Instance make_instance(const GridMap& map, const std::vector<ScenEntry>& entries, int n);

// Height lines, top line is y = height-1, '@' obstacle, '.' free, joined
// with '\n' and no trailing newline. parse_map(render_ascii(m)) == m.
std::string render_ascii(const GridMap& m);

std::string read_file(const std::string& path);
GridMap load_map_file(const std::string& path);
std::vector<ScenEntry> load_scen_file(const std::string& path, const GridMap& map);

// Conventional layout under a data directory:
//   <dir>/maps/<name>.map
//   <dir>/scen-random/<name>-random-<index>.scen
std::string map_path(const std::string& data_dir, const std::string& map_name);
std::string scen_path(const std::string& data_dir, const std::string& map_name,
                      int scenario_index);

}  // namespace mapf
