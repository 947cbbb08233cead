#include "mapf/prompting.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "mapf/bench_io.hpp"
#include "mapf/prompt_assets.hpp"

namespace mapf {

namespace {

constexpr const char* kMapSlot = "[[Map Description]]";

std::string coord_tight(Coord c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

std::string coord_spaced(Coord c) {
    return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

std::string template_text(Mode mode) {
    std::string t = mode == Mode::SBS ? assets::kSystemPromptSbs : assets::kSystemPromptOs;
    if (!t.empty() && t.back() == '\n') t.pop_back();  // asset files end with a newline
    return t;
}

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
    lines.push_back(cur);
    return lines;
}

// "... Agent 3: (5, 12)" with arbitrary leading prose; the last occurrence
// on the line wins.
const std::regex& agent_line_re() {
    static const std::regex re(
        R"(.*\bAgent\s*(\d+)\s*:\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*[.,;]?\s*)",
        std::regex::icase);
    return re;
}

// "Step 4:" optionally with a parenthetical tag.
const std::regex& step_header_re() {
    static const std::regex re(R"(\s*Step\s+(\d+)\s*(?:\([^)]*\))?\s*:\s*)",
                               std::regex::icase);
    return re;
}

struct AgentLine {
    int agent;
    Coord cell;
};

std::optional<AgentLine> match_agent_line(const std::string& line) {
    std::smatch m;
    if (!std::regex_match(line, m, agent_line_re())) return std::nullopt;
    return AgentLine{std::stoi(m[1]), {std::stoi(m[2]), std::stoi(m[3])}};
}

// Validates one block of agent lines against the required coverage 1..n.
std::variant<JointConfig, ParseError> block_to_config(const std::vector<AgentLine>& block,
                                                      int n) {
    JointConfig cfg(n);
    std::vector<bool> seen(n, false);
    for (const AgentLine& al : block) {
        if (al.agent < 1 || al.agent > n)
            return ParseError{"solution block names agent " + std::to_string(al.agent) +
                              " but there are only " + std::to_string(n) + " agents"};
        if (seen[al.agent - 1])
            return ParseError{"solution block lists agent " + std::to_string(al.agent) +
                              " more than once"};
        seen[al.agent - 1] = true;
        cfg[al.agent - 1] = al.cell;
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            return ParseError{"solution block is missing agent " + std::to_string(i + 1)};
    return cfg;
}

}  // namespace

const char* to_string(MapEncoding e) {
    switch (e) {
        case MapEncoding::None: return "None";
        case MapEncoding::TOM: return "TOM";
        case MapEncoding::TOO: return "TOO";
        case MapEncoding::MM: return "MM";
    }
    return "?";
}

const char* to_string(Mode m) { return m == Mode::SBS ? "SBS" : "OS"; }

std::optional<MapEncoding> map_encoding_from_string(const std::string& s) {
    if (s == "None" || s == "none") return MapEncoding::None;
    if (s == "TOM" || s == "tom") return MapEncoding::TOM;
    if (s == "TOO" || s == "too") return MapEncoding::TOO;
    if (s == "MM" || s == "mm") return MapEncoding::MM;
    return std::nullopt;
}

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "SBS" || s == "sbs") return Mode::SBS;
    if (s == "OS" || s == "os") return Mode::OS;
    return std::nullopt;
}

Message system_prompt(const std::string& map_description, Mode mode) {
    std::string text = template_text(mode);
    size_t at = text.find(kMapSlot);
    if (at == std::string::npos)
        throw std::logic_error("system prompt template lost its map-description slot");
    text.replace(at, std::string(kMapSlot).size(), map_description);
    return Message{Role::System, std::move(text), std::nullopt};
}

std::string default_map_description(const GridMap& m) {
    std::string size = std::to_string(m.width()) + "*" + std::to_string(m.height());
    std::string family = m.name().substr(0, m.name().find('-'));
    if (family == "room") return "room-like map with size " + size;
    if (family == "maze") return "maze-like map with size " + size;
    if (m.obstacle_count() == 0) return "a map with size " + size + " and no obstacle";
    return "a map with size " + size;
}

Message scenario_prompt(const Instance& inst, const PromptVariant& v) {
    std::vector<std::string> lines;
    for (int i = 0; i < inst.num_agents(); ++i)
        lines.push_back("Agent " + std::to_string(i + 1) + " is currently in " +
                        coord_tight(inst.starts()[i]) + ", and wants to go to " +
                        coord_tight(inst.goals()[i]) + ".");

    const GridMap& m = inst.map();
    std::optional<MapImage> image;
    switch (v.map_encoding) {
        case MapEncoding::None:
            break;
        case MapEncoding::TOM: {
            lines.push_back(
                "The map is as follows, where '@' denotes a cell with an obstacle that an "
                "agent cannot pass, and '.' denotes an empty cell that an agent can pass.");
            lines.push_back("The bottom-left cell is (0,0) and the bottom-right cell is (" +
                            std::to_string(m.width() - 1) + ",0):");
            for (const std::string& row : split_lines(render_ascii(m))) lines.push_back(row);
            break;
        }
        case MapEncoding::TOO: {
            std::string listing = "The obstacles are located at: ";
            std::vector<Coord> obstacles = m.obstacles();  // row-major order
            if (obstacles.empty()) {
                listing += "none.";
            } else {
                for (size_t i = 0; i < obstacles.size(); ++i) {
                    if (i) listing += ", ";
                    listing += coord_tight(obstacles[i]);
                }
                listing += ".";
            }
            lines.push_back(listing);
            break;
        }
        case MapEncoding::MM:
            image = render_image(m);
            break;
    }

    if (v.sso) {
        lines.push_back("In the next step:");
        for (int i = 0; i < inst.num_agents(); ++i)
            lines.push_back(sso_line(i + 1, m, inst.starts()[i]));
    }

    std::string text;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) text += "\n";
        text += lines[i];
    }
    return Message{Role::User, std::move(text), std::move(image)};
}

std::string sso_line(int agent_id, const GridMap& m, Coord c) {
    std::string out = "Agent " + std::to_string(agent_id) + " can move [";
    auto actions = valid_actions(m, c);
    for (size_t i = 0; i < actions.size(); ++i) {
        const auto& [action, target] = actions[i];
        if (i) out += ", ";
        out += "'";
        out += action_name(action);
        out += action == Action::Stay ? " at " : " to ";
        out += coord_spaced(target);
        out += "'";
    }
    out += "].";
    return out;
}

namespace {

std::string joined_ids(const std::vector<int>& ids, const char* sep) {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(ids[i]);
    }
    return out;
}

// Violation descriptions shared by the per-step and whole-plan feedback:
// "Agent (1,2), (4,5) are colliding with each other." and friends.
std::vector<std::string> failure_clauses(const ValidationReport& report) {
    std::vector<std::string> clauses;
    auto vertex = report.vertex_conflicts();
    if (!vertex.empty()) {
        std::string groups;
        for (size_t i = 0; i < vertex.size(); ++i) {
            if (i) groups += ", ";
            groups += "(" + joined_ids(vertex[i].agents, ",") + ")";
        }
        clauses.push_back("Agent " + groups + " are colliding with each other.");
    }
    auto obstacle_ids = report.obstacle_agents();
    if (!obstacle_ids.empty())
        clauses.push_back("Agent " + joined_ids(obstacle_ids, ",") +
                          " is colliding with obstacles.");
    auto bad_moves = report.invalid_move_agents();
    if (!bad_moves.empty())
        clauses.push_back("Agent " + joined_ids(bad_moves, ",") +
                          " is making an invalid move.");
    return clauses;
}

}  // namespace

std::string feedback_message(const ValidationReport& report,
                             const std::optional<std::vector<std::string>>& next_sso) {
    if (report.valid()) {
        std::string out = "Good job. Keep moving.";
        if (next_sso) {
            out += " In the next step:";
            for (const std::string& line : *next_sso) out += "\n" + line;
        }
        return out;
    }

    std::string out;
    bool first = true;
    for (const std::string& clause : failure_clauses(report)) {
        if (!first) out += "\n";
        out += "You are wrong. " + clause + " Please correct the current step.";
        first = false;
    }
    return out;
}

std::string parse_failure_feedback(Mode mode) {
    std::string out =
        "You are wrong. I could not find your validated solution in the required format "
        "of a sequence of : [[Agent_id]]: [[Coordinate]].";
    out += mode == Mode::SBS ? " Please correct the current step."
                             : " Please provide the complete corrected plan.";
    return out;
}

std::string os_failure_feedback(int step, const ValidationReport& report) {
    std::string out = "You are wrong. In step " + std::to_string(step) + ":";
    for (const std::string& clause : failure_clauses(report)) out += " " + clause;
    out += " Please correct your plan and provide the complete plan again.";
    return out;
}

std::string os_goal_feedback() {
    return "You are wrong. Your plan does not bring every agent to its goal. Please correct "
           "your plan and provide the complete plan again.";
}

std::string os_length_feedback(int makespan, int bound) {
    return "You are wrong. Your plan takes " + std::to_string(makespan) +
           " steps, but a valid plan must take at most " + std::to_string(bound) +
           " steps. Please correct your plan and provide the complete plan again.";
}

std::variant<JointConfig, ParseError> parse_response_sbs(const std::string& text, int n) {
    std::vector<AgentLine> last_block, current;
    for (const std::string& line : split_lines(text)) {
        if (auto al = match_agent_line(line)) {
            current.push_back(*al);
        } else if (!current.empty()) {
            last_block = std::move(current);
            current.clear();
        }
    }
    if (!current.empty()) last_block = std::move(current);
    if (last_block.empty()) return ParseError{"no solution block found"};
    return block_to_config(last_block, n);
}

std::variant<std::vector<JointConfig>, ParseError> parse_response_os(const std::string& text,
                                                                     int n) {
    enum class LineKind { Header, Agent, Blank, Other };
    struct Tagged {
        LineKind kind;
        int step = 0;
        AgentLine agent{0, {0, 0}};
    };

    std::vector<Tagged> tagged;
    for (const std::string& line : split_lines(text)) {
        std::smatch m;
        if (std::regex_match(line, m, step_header_re())) {
            tagged.push_back({LineKind::Header, std::stoi(m[1]), {}});
        } else if (auto al = match_agent_line(line)) {
            tagged.push_back({LineKind::Agent, 0, *al});
        } else if (line.find_first_not_of(" \t\r") == std::string::npos) {
            tagged.push_back({LineKind::Blank, 0, {}});
        } else {
            tagged.push_back({LineKind::Other, 0, {}});
        }
    }

    // The last run of non-Other lines holding both a step header and agent
    // coordinates is the candidate plan region.
    size_t region_begin = tagged.size(), region_end = tagged.size();
    size_t run_start = 0;
    bool in_run = false, run_has_header = false, run_has_agent = false;
    for (size_t i = 0; i <= tagged.size(); ++i) {
        bool boundary = i == tagged.size() || tagged[i].kind == LineKind::Other;
        if (boundary) {
            if (in_run && run_has_header && run_has_agent) {
                region_begin = run_start;
                region_end = i;
            }
            in_run = false;
            run_has_header = false;
            run_has_agent = false;
        } else {
            if (!in_run) {
                in_run = true;
                run_start = i;
            }
            if (tagged[i].kind == LineKind::Header) run_has_header = true;
            if (tagged[i].kind == LineKind::Agent) run_has_agent = true;
        }
    }
    if (region_begin == tagged.size()) return ParseError{"no step-labeled plan found"};

    std::vector<std::vector<AgentLine>> blocks;
    for (size_t i = region_begin; i < region_end; ++i) {
        switch (tagged[i].kind) {
            case LineKind::Header:
                if (tagged[i].step != static_cast<int>(blocks.size()) + 1)
                    return ParseError{"expected Step " + std::to_string(blocks.size() + 1) +
                                      " but found Step " + std::to_string(tagged[i].step)};
                blocks.emplace_back();
                break;
            case LineKind::Agent:
                if (blocks.empty())
                    return ParseError{"agent coordinates appear before any step label"};
                blocks.back().push_back(tagged[i].agent);
                break;
            case LineKind::Blank:
            case LineKind::Other:
                break;
        }
    }

    std::vector<JointConfig> plan;
    for (size_t t = 0; t < blocks.size(); ++t) {
        auto cfg = block_to_config(blocks[t], n);
        if (auto* err = std::get_if<ParseError>(&cfg))
            return ParseError{"step " + std::to_string(t + 1) + ": " + err->message};
        plan.push_back(std::get<JointConfig>(std::move(cfg)));
    }
    if (plan.empty()) return ParseError{"no step-labeled plan found"};
    return plan;
}

std::string format_solution_block(const JointConfig& cfg) {
    std::string out;
    for (size_t i = 0; i < cfg.size(); ++i) {
        if (i) out += "\n";
        out += "Agent " + std::to_string(i + 1) + ": " + coord_tight(cfg[i]);
    }
    return out;
}

}  // namespace mapf
