#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "mapf/backend.hpp"
#include "mapf/prompting.hpp"
#include "mapf/validator.hpp"

namespace mapf {

struct LoopConfig {
    PromptVariant variant;
    int max_consecutive_failures = 5;       // corrective failures tolerated per step
    double makespan_multiplier = 3.0;       // fail when makespan would exceed mult * optimal
    long long context_budget_tokens = 100000;  // proactive session restart threshold
    bool restart_on_rate_limit = true;
    std::chrono::milliseconds wall_clock_timeout{std::chrono::minutes(30)};
    std::string map_description;  // empty -> default_map_description(map)
};

enum class RunStatus { Success, FailMakespan, FailIterations, FailBackend };

const char* to_string(RunStatus s);
std::optional<RunStatus> run_status_from_string(const std::string& s);

struct StepTokens {
    long long prompt = 0;
    long long completion = 0;
};

// Ordered log of everything that crossed the session boundary, plus the
// checker's verdicts. kind is "message" or "validation".
struct TranscriptRecord {
    std::string kind;
    int session = 0;    // restart counter at the time of the record
    int step = 0;       // 1-based step being decided
    int iteration = 0;  // 1-based response attempt within the step
    std::string role;   // message records: system/user/assistant
    std::string text;
    bool has_image = false;
    long long prompt_tokens = 0;      // assistant records: usage delta
    long long completion_tokens = 0;
    bool valid = false;               // validation records
    std::vector<Violation> violations;
    std::string parse_error;          // non-empty when the response did not parse
    long long ts_ms = 0;              // wall clock, epoch milliseconds
};

struct FailureRecord {
    int step = 0;
    int iteration = 0;
    bool parse_failed = false;
    std::string parse_message;
    ValidationReport report;
};

struct RunResult {
    RunStatus status = RunStatus::FailBackend;
    std::vector<JointConfig> plan;  // plan[0] = starts; every appended config passed check_step
    std::optional<int> makespan;
    std::optional<double> makespan_ratio;  // makespan / lower bound, when defined
    std::vector<int> iterations_per_step;  // responses consumed per completed step; on
                                           // FailIterations the aborted step contributes the
                                           // corrective-failure count
    int restarts = 0;
    std::vector<StepTokens> token_log;     // one entry per attempted step
    std::vector<TranscriptRecord> transcript;
    std::vector<FailureRecord> failures;   // every rejected response, in order
    int lower_bound = 0;
    int optimal_reference = 0;             // joint optimum or the lower bound
    std::string optimal_reference_kind;    // "joint_optimal" | "lower_bound"
    std::string failure_detail;
    double elapsed_seconds = 0.0;

    long long total_prompt_tokens() const;
    long long total_completion_tokens() const;
};

// The step-by-step loop: prompt, parse, check, feed back, retry; advance on
// valid steps, restart the session on rate limits or when the session's
// token usage exceeds the budget, and stop on success or a failure
// criterion.
RunResult solve_sbs(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                    const SessionParams& params = {});

// The one-shot variant: request a whole plan, validate it end to end, and
// feed back the first failing step, up to max_consecutive_failures attempts.
RunResult solve_os(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                   const SessionParams& params = {});

RunResult solve(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                const SessionParams& params = {});

}  // namespace mapf
