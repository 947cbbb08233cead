#include "mapf/bench_io.hpp"

#include <fstream>
#include <sstream>

namespace mapf {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

int parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ScenFormatError(std::string("bad integer field for ") + what + ": '" + s + "'");
    }
}

}  // namespace

GridMap parse_map(const std::string& text, const std::string& name) {
    std::vector<std::string> lines = split_lines(text);
    size_t i = 0;
    int width = -1, height = -1;
    bool saw_map = false;
    for (; i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        std::string key;
        ls >> key;
        if (key == "type") {
            continue;  // value ("octile") is informational
        } else if (key == "height") {
            if (!(ls >> height)) throw MapFormatError("map header: bad height line");
        } else if (key == "width") {
            if (!(ls >> width)) throw MapFormatError("map header: bad width line");
        } else if (key == "map") {
            saw_map = true;
            ++i;
            break;
        } else if (key.empty()) {
            continue;
        } else {
            throw MapFormatError("map header: unexpected line '" + lines[i] + "'");
        }
    }
    if (!saw_map || width < 1 || height < 1)
        throw MapFormatError("map header: missing type/height/width/map lines");
    if (lines.size() < i + static_cast<size_t>(height))
        throw MapFormatError("map body: expected " + std::to_string(height) + " rows, got " +
                             std::to_string(lines.size() - i));

    std::vector<Coord> obstacles;
    for (int row = 0; row < height; ++row) {
        const std::string& line = lines[i + row];
        if (static_cast<int>(line.size()) != width)
            throw MapFormatError("map body: row " + std::to_string(row) + " has length " +
                                 std::to_string(line.size()) + ", expected " +
                                 std::to_string(width));
        for (int col = 0; col < width; ++col) {
            char ch = line[col];
            if (ch == '.' || ch == 'G') continue;
            if (ch == '@' || ch == 'O' || ch == 'T') {
                obstacles.push_back({col, height - 1 - row});
            } else {
                throw MapFormatError(std::string("map body: unknown character '") + ch + "'");
            }
        }
    }
    // Trailing non-empty lines after the body are a format violation.
    for (size_t j = i + height; j < lines.size(); ++j)
        if (!lines[j].empty())
            throw MapFormatError("map body: trailing content after " + std::to_string(height) +
                                 " rows");
    return GridMap(width, height, obstacles, name);
}

std::vector<ScenEntry> parse_scen(const std::string& text, const GridMap& map) {
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty() || lines[0].rfind("version", 0) != 0)
        throw ScenFormatError("scen: missing version line");

    std::vector<ScenEntry> entries;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> f = split_fields(lines[i], '\t');
        if (f.size() != 9)
            throw ScenFormatError("scen line " + std::to_string(i + 1) + ": expected 9 fields, got " +
                                  std::to_string(f.size()));
        ScenEntry e;
        e.bucket = parse_int(f[0], "bucket");
        e.map_name = f[1];
        e.map_width = parse_int(f[2], "width");
        e.map_height = parse_int(f[3], "height");
        if (e.map_width != map.width() || e.map_height != map.height())
            throw ScenFormatError("scen line " + std::to_string(i + 1) +
                                  ": map dimensions do not match the loaded map");
        int scol = parse_int(f[4], "start col");
        int srow = parse_int(f[5], "start row");
        int gcol = parse_int(f[6], "goal col");
        int grow = parse_int(f[7], "goal row");
        try {
            e.optimal_single_agent_distance = std::stod(f[8]);
        } catch (const std::exception&) {
            throw ScenFormatError("scen line " + std::to_string(i + 1) + ": bad distance field");
        }
        // Scenario rows count from the top; flip into the bottom-left frame.
        e.start = {scol, map.height() - 1 - srow};
        e.goal = {gcol, map.height() - 1 - grow};
        for (const Coord& c : {e.start, e.goal}) {
            if (!map.in_bounds(c))
                throw ScenFormatError("scen line " + std::to_string(i + 1) + ": cell " +
                                      to_string(c) + " out of bounds");
            if (map.is_obstacle(c))
                throw ScenFormatError("scen line " + std::to_string(i + 1) + ": cell " +
                                      to_string(c) + " lies on an obstacle");
        }
        entries.push_back(e);
    }
    return entries;
}

Instance make_instance(const GridMap& map, const std::vector<ScenEntry>& entries, int n) {
    if (n < 1) throw std::invalid_argument("make_instance: need at least one agent");
    if (static_cast<size_t>(n) > entries.size())
        throw std::invalid_argument("make_instance: requested " + std::to_string(n) +
                                    " agents but scenario has only " +
                                    std::to_string(entries.size()) + " entries");
    std::vector<Coord> starts, goals;
    starts.reserve(n);
    goals.reserve(n);
    for (int i = 0; i < n; ++i) {
        starts.push_back(entries[i].start);
        goals.push_back(entries[i].goal);
    }
    return Instance(map, std::move(starts), std::move(goals));
}

std::string render_ascii(const GridMap& m) {
    std::string out;
    out.reserve(static_cast<size_t>(m.height()) * (m.width() + 1));
    for (int y = m.height() - 1; y >= 0; --y) {
        for (int x = 0; x < m.width(); ++x)
            out.push_back(m.is_obstacle({x, y}) ? '@' : '.');
        if (y > 0) out.push_back('\n');
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

GridMap load_map_file(const std::string& path) {
    // Derive the map label from the filename: ".../room-32-32-4.map" -> "room-32-32-4".
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.substr(base.size() - 4) == ".map")
        base = base.substr(0, base.size() - 4);
    return parse_map(read_file(path), base);
}

std::vector<ScenEntry> load_scen_file(const std::string& path, const GridMap& map) {
    return parse_scen(read_file(path), map);
}

std::string map_path(const std::string& data_dir, const std::string& map_name) {
    return data_dir + "/maps/" + map_name + ".map";
}

std::string scen_path(const std::string& data_dir, const std::string& map_name,
                      int scenario_index) {
    return data_dir + "/scen-random/" + map_name + "-random-" +
           std::to_string(scenario_index) + ".scen";
}

}  // namespace mapf
