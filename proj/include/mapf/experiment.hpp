#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapf/serialize.hpp"
#include "mapf/solver_loop.hpp"

namespace mapf {

struct BackendSpec {
    std::string kind = "oracle";  // oracle | scripted | http
    std::vector<std::string> responses;  // scripted
    bool cycle = false;                  // scripted
    std::string base_url;                // http
    std::string model;                   // http
    std::string api_key_env = "MAPF_API_KEY";
};

struct SuiteConfig {
    std::string map_name;
    std::string data_dir = "data";
    std::vector<int> scenarios{1, 2, 3, 4, 5};
    std::vector<int> agent_counts;
    std::vector<PromptVariant> variants;
    BackendSpec backend;
    LoopConfig loop;
    int repeats = 1;
    int seed = 42;
    int parallelism = 1;
    std::string output_dir = "results";
};

SuiteConfig load_suite_config(const std::string& path);
SuiteConfig suite_config_from_json(const nlohmann::json& j);

std::string run_id(const std::string& map_name, int scenario, int n,
                   const PromptVariant& variant, const std::string& backend_kind, int seed,
                   int repeat);

enum class FailureClass { Oscillation, LongDetour, IterationLimit, Backend };
const char* to_string(FailureClass c);

// FailIterations -> iteration limit; FailMakespan -> oscillation when some
// agent occupies one cell at least `revisit_threshold` times, else long
// detour; FailBackend -> backend. Throws std::invalid_argument on a success.
FailureClass classify_failure(const RunRecord& r, int revisit_threshold = 4);

inline constexpr int kDefaultRevisitThreshold = 4;

// One aggregated report cell: (map, n, variant), averages over successes.
struct ReportCell {
    std::string map_name;
    int n = 0;
    PromptVariant variant;
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;  // percent
    std::optional<double> avg_iterations_per_step;
    std::optional<double> avg_makespan_ratio;
    std::optional<double> avg_tokens_per_agent_step;
    double avg_restarts = 0.0;
    int fail_oscillation = 0;
    int fail_long_detour = 0;
    int fail_iteration_limit = 0;
    int fail_backend = 0;
};

struct SuiteReport {
    std::vector<ReportCell> cells;  // deterministic order: map, n, variant label
    std::string render_tables() const;
    std::string render_csv() const;
    // n -> mean over successful runs of total tokens / (agents * steps).
    std::map<int, double> token_growth_series() const;
};

SuiteReport aggregate(const std::vector<RunRecord>& records,
                      int revisit_threshold = kDefaultRevisitThreshold);

// Mean tokens per agent-step keyed by agent count; runs with zero steps are
// skipped, agent counts without successes are absent.
std::map<int, double> token_growth_series(const std::vector<RunRecord>& records);

// Executes every (scenario, n, variant, repeat) cell, persisting one record
// and one transcript per run under cfg.output_dir. Cells whose record file
// already exists are skipped, so an interrupted suite resumes where it
// stopped.
SuiteReport run_suite(const SuiteConfig& cfg);

// Reads every persisted record under `results_dir` (recursively, sorted) and
// aggregates. Throws std::runtime_error when none are found.
std::vector<RunRecord> load_results(const std::string& results_dir);

}  // namespace mapf
