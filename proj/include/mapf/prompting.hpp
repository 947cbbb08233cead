#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/image.hpp"
#include "mapf/validator.hpp"

namespace mapf {

// How the map reaches the model: not at all (empty maps), as the ASCII map
// text (TOM), as an obstacle coordinate list (TOO), or as an image (MM).
enum class MapEncoding { None, TOM, TOO, MM };

// Step-by-step action generation vs. one-shot whole-plan generation.
enum class Mode { SBS, OS };

struct PromptVariant {
    MapEncoding map_encoding = MapEncoding::None;
    bool sso = true;  // single-step observation lines
    Mode mode = Mode::SBS;
};

const char* to_string(MapEncoding e);
const char* to_string(Mode m);
std::optional<MapEncoding> map_encoding_from_string(const std::string& s);
std::optional<Mode> mode_from_string(const std::string& s);

enum class Role { System, User, Assistant };

struct Message {
    Role role = Role::User;
    std::string text;
    std::optional<MapImage> image;  // MM scenario message only
};

// The fixed solver instructions with the map-description slot substituted.
// The template is a build-embedded versioned asset; an empty description is
// permitted but suspicious (callers may warn).
Message system_prompt(const std::string& map_description, Mode mode = Mode::SBS);

// Conventional description per map family: "room-like map with size 32*32",
// "a map with size 8*8 and no obstacle", ...
std::string default_map_description(const GridMap& m);

// First user message of a session. One line per agent
//   "Agent {i} is currently in ({x},{y}), and wants to go to ({gx},{gy})."
// plus the map section per the variant's encoding, plus the SSO section when
// enabled. Restarts construct a fresh Instance whose starts are the current
// positions and reuse this.
Message scenario_prompt(const Instance& inst, const PromptVariant& v);

// "Agent {i} can move ['stay at (x, y)', 'right to (x, y)', ...]." in
// valid-action order. Coordinates here carry a space after the comma,
// unlike scenario lines; both spellings are reproduced faithfully.
std::string sso_line(int agent_id, const GridMap& m, Coord c);

// Post-step user message. Valid: "Good job. Keep moving." plus the SSO block
// when lines are supplied. Invalid: "You are wrong. ..." sentences, vertex
// conflicts first, then obstacle collisions, then continuity breaks.
std::string feedback_message(const ValidationReport& report,
                             const std::optional<std::vector<std::string>>& next_sso);

// Correction request when no solution block can be parsed at all.
std::string parse_failure_feedback(Mode mode = Mode::SBS);

// One-shot-mode corrections, naming the first failing step. The iteration
// templates above are fixed by the step-by-step workflow; these are harness
// conventions in the same register.
std::string os_failure_feedback(int step, const ValidationReport& report);
std::string os_goal_feedback();
std::string os_length_feedback(int makespan, int bound);

struct ParseError {
    std::string message;
};

// Scans for the LAST contiguous block of "Agent {i}: ({x},{y})" lines
// (tolerating "(x, y)" spacing and leading prose) and requires agents 1..n
// exactly once.
std::variant<JointConfig, ParseError> parse_response_sbs(const std::string& text, int n);

// Parses the last contiguous region of "Step {t}:" headers with agent lines;
// steps must be labeled 1..T in order, each covering agents 1..n exactly
// once. Returns the configs after moves 1..T (the starts are not included).
std::variant<std::vector<JointConfig>, ParseError> parse_response_os(const std::string& text,
                                                                     int n);

// "Agent {i}: ({x},{y})" lines; the inverse of parse_response_sbs.
std::string format_solution_block(const JointConfig& cfg);

}  // namespace mapf
