#include "mapf/solver_loop.hpp"

#include <cmath>
#include <memory>

#include "mapf/search.hpp"

namespace mapf {

namespace {

long long now_epoch_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

const char* role_name(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "?";
}

void validate_config(const LoopConfig& cfg) {
    if (cfg.max_consecutive_failures < 1)
        throw std::invalid_argument("LoopConfig: max_consecutive_failures must be >= 1");
    if (cfg.makespan_multiplier < 1.0)
        throw std::invalid_argument("LoopConfig: makespan_multiplier must be >= 1");
}

// Shared mechanics of both loop modes: session lifecycle, transcript
// bookkeeping, the optimal reference, and the step bound.
class LoopRunner {
public:
    LoopRunner(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
               SessionParams params)
        : inst_(inst), cfg_(cfg), backend_(backend), params_(std::move(params)) {
        validate_config(cfg);
        start_time_ = std::chrono::steady_clock::now();
        result_.lower_bound = makespan_lower_bound(inst);
        if (joint_optimal_applicable(inst)) {
            if (auto opt = joint_optimal(inst)) {
                result_.optimal_reference = *opt;
                result_.optimal_reference_kind = "joint_optimal";
            }
        }
        if (result_.optimal_reference_kind.empty()) {
            result_.optimal_reference = result_.lower_bound;
            result_.optimal_reference_kind = "lower_bound";
        }
        max_steps_ = static_cast<int>(
            std::floor(cfg.makespan_multiplier * result_.optimal_reference + 1e-9));
        map_description_ = cfg.map_description.empty()
                               ? default_map_description(inst.map())
                               : cfg.map_description;
    }

    RunResult run() {
        positions_ = inst_.starts();
        result_.plan = {positions_};
        if (at_goals(positions_, inst_.goals())) {
            result_.status = RunStatus::Success;
            result_.makespan = 0;
            if (result_.lower_bound > 0) result_.makespan_ratio = 0.0;
            return finish();
        }
        start_session();
        return cfg_.variant.mode == Mode::SBS ? run_sbs() : run_os();
    }

protected:
    RunResult run_sbs();
    RunResult run_os();

    bool timed_out() const {
        return std::chrono::steady_clock::now() - start_time_ > cfg_.wall_clock_timeout;
    }

    void start_session() {
        session_ = std::make_unique<ChatSession>(backend_, params_);
        Message sys = system_prompt(map_description_, cfg_.variant.mode);
        record_message(sys, 0, 0);
        session_->set_system(std::move(sys));
        Instance current(inst_.map(), positions_, inst_.goals());
        pending_ = scenario_prompt(current, cfg_.variant);
        steps_in_session_ = 0;
    }

    void restart_session() {
        ++result_.restarts;
        ++session_index_;
        start_session();
    }

    // Sends the pending message; records both sides in the transcript.
    std::string send_pending(int step, int iteration) {
        record_message(pending_, step, iteration);
        std::string reply = session_->send(pending_);
        TranscriptRecord rec = make_record("message", step, iteration);
        rec.role = role_name(Role::Assistant);
        rec.text = reply;
        rec.prompt_tokens = session_->last_delta().prompt_tokens;
        rec.completion_tokens = session_->last_delta().completion_tokens;
        result_.transcript.push_back(std::move(rec));
        return reply;
    }

    void record_message(const Message& msg, int step, int iteration) {
        TranscriptRecord rec = make_record("message", step, iteration);
        rec.role = role_name(msg.role);
        rec.text = msg.text;
        rec.has_image = msg.image.has_value();
        result_.transcript.push_back(std::move(rec));
    }

    void record_validation(int step, int iteration, bool valid, const ValidationReport& report,
                           const std::string& parse_error) {
        TranscriptRecord rec = make_record("validation", step, iteration);
        rec.valid = valid;
        rec.violations = report.violations;
        rec.parse_error = parse_error;
        result_.transcript.push_back(std::move(rec));
    }

    TranscriptRecord make_record(const char* kind, int step, int iteration) const {
        TranscriptRecord rec;
        rec.kind = kind;
        rec.session = session_index_;
        rec.step = step;
        rec.iteration = iteration;
        rec.ts_ms = now_epoch_ms();
        return rec;
    }

    std::optional<std::vector<std::string>> sso_lines_for(const JointConfig& positions) const {
        if (!cfg_.variant.sso) return std::nullopt;
        std::vector<std::string> lines;
        for (size_t i = 0; i < positions.size(); ++i)
            lines.push_back(sso_line(static_cast<int>(i) + 1, inst_.map(), positions[i]));
        return lines;
    }

    RunResult finish() {
        result_.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_)
                .count();
        return std::move(result_);
    }

    void set_ratio(int makespan) {
        result_.makespan = makespan;
        if (result_.lower_bound > 0)
            result_.makespan_ratio =
                static_cast<double>(makespan) / result_.lower_bound;
    }

    const Instance& inst_;
    const LoopConfig& cfg_;
    ChatBackend& backend_;
    SessionParams params_;
    RunResult result_;
    JointConfig positions_;
    std::unique_ptr<ChatSession> session_;
    Message pending_;
    int session_index_ = 0;
    int steps_in_session_ = 0;
    int max_steps_ = 0;
    std::string map_description_;
    std::chrono::steady_clock::time_point start_time_;
};

RunResult LoopRunner::run_sbs() {
    const int n = inst_.num_agents();
    int t = 0;  // steps taken
    while (true) {
        if (t >= max_steps_) {
            result_.status = RunStatus::FailMakespan;
            result_.failure_detail = "step budget exhausted: " + std::to_string(t) +
                                     " steps taken, bound " + std::to_string(max_steps_) +
                                     " (" + std::to_string(cfg_.makespan_multiplier) + " x " +
                                     result_.optimal_reference_kind + " " +
                                     std::to_string(result_.optimal_reference) + ")";
            return finish();
        }

        const int step = t + 1;
        int attempts = 0;
        int corrective_failures = 0;
        bool awaiting_correction = false;  // pending_ is corrective feedback
        StepTokens tokens;

        while (true) {
            if (timed_out()) {
                result_.status = RunStatus::FailBackend;
                result_.failure_detail = "wall-clock timeout";
                if (attempts > 0) result_.token_log.push_back(tokens);
                return finish();
            }
            if (!awaiting_correction && steps_in_session_ > 0 &&
                session_->usage().total() > cfg_.context_budget_tokens) {
                restart_session();
            }

            std::string reply;
            try {
                reply = send_pending(step, attempts + 1);
            } catch (const RateLimitError& e) {
                if (cfg_.restart_on_rate_limit) {
                    restart_session();
                    awaiting_correction = false;
                    continue;
                }
                result_.status = RunStatus::FailBackend;
                result_.failure_detail = e.what();
                if (attempts > 0) result_.token_log.push_back(tokens);
                return finish();
            } catch (const BackendError& e) {
                result_.status = RunStatus::FailBackend;
                result_.failure_detail = e.what();
                if (attempts > 0) result_.token_log.push_back(tokens);
                return finish();
            }
            ++attempts;
            tokens.prompt += session_->last_delta().prompt_tokens;
            tokens.completion += session_->last_delta().completion_tokens;

            auto parsed = parse_response_sbs(reply, n);
            ValidationReport report;
            std::string parse_error;
            bool valid = false;
            if (const auto* err = std::get_if<ParseError>(&parsed)) {
                parse_error = err->message;
            } else {
                report = check_step(inst_.map(), positions_, std::get<JointConfig>(parsed));
                valid = report.valid();
            }
            record_validation(step, attempts, valid, report, parse_error);

            if (valid) {
                positions_ = std::get<JointConfig>(std::move(parsed));
                result_.plan.push_back(positions_);
                result_.iterations_per_step.push_back(attempts);
                result_.token_log.push_back(tokens);
                ++t;
                ++steps_in_session_;
                if (at_goals(positions_, inst_.goals())) {
                    result_.status = RunStatus::Success;
                    set_ratio(t);
                    return finish();
                }
                pending_ = Message{Role::User,
                                   feedback_message(report, sso_lines_for(positions_)),
                                   std::nullopt};
                break;
            }

            result_.failures.push_back(
                {step, attempts, !parse_error.empty(), parse_error, report});
            if (awaiting_correction) ++corrective_failures;
            if (corrective_failures >= cfg_.max_consecutive_failures) {
                result_.iterations_per_step.push_back(corrective_failures);
                result_.token_log.push_back(tokens);
                result_.status = RunStatus::FailIterations;
                result_.failure_detail =
                    "step " + std::to_string(step) + " failed " +
                    std::to_string(corrective_failures) +
                    " consecutive times after the first feedback";
                return finish();
            }
            pending_ = Message{Role::User,
                               parse_error.empty() ? feedback_message(report, std::nullopt)
                                                   : parse_failure_feedback(),
                               std::nullopt};
            awaiting_correction = true;
        }
    }
}

RunResult LoopRunner::run_os() {
    const int n = inst_.num_agents();
    int attempts = 0;
    StepTokens tokens;
    bool last_failure_was_length = false;

    while (attempts < cfg_.max_consecutive_failures) {
        if (timed_out()) {
            result_.status = RunStatus::FailBackend;
            result_.failure_detail = "wall-clock timeout";
            break;
        }

        std::string reply;
        try {
            reply = send_pending(1, attempts + 1);
        } catch (const RateLimitError& e) {
            if (cfg_.restart_on_rate_limit) {
                restart_session();
                continue;
            }
            result_.status = RunStatus::FailBackend;
            result_.failure_detail = e.what();
            break;
        } catch (const BackendError& e) {
            result_.status = RunStatus::FailBackend;
            result_.failure_detail = e.what();
            break;
        }
        ++attempts;
        tokens.prompt += session_->last_delta().prompt_tokens;
        tokens.completion += session_->last_delta().completion_tokens;
        last_failure_was_length = false;

        auto parsed = parse_response_os(reply, n);
        if (const auto* err = std::get_if<ParseError>(&parsed)) {
            record_validation(1, attempts, false, {}, err->message);
            result_.failures.push_back({0, attempts, true, err->message, {}});
            pending_ = Message{Role::User, parse_failure_feedback(Mode::OS), std::nullopt};
            continue;
        }

        std::vector<JointConfig> full = {inst_.starts()};
        auto& steps = std::get<std::vector<JointConfig>>(parsed);
        full.insert(full.end(), steps.begin(), steps.end());
        PlanReport plan_report = check_plan(inst_, full);

        if (!plan_report.movement_valid) {
            int bad_step = *plan_report.first_invalid_step;
            const ValidationReport& step_report = plan_report.step_reports[bad_step - 1];
            record_validation(bad_step, attempts, false, step_report, "");
            result_.failures.push_back({bad_step, attempts, false, "", step_report});
            pending_ = Message{Role::User, os_failure_feedback(bad_step, step_report),
                               std::nullopt};
            continue;
        }
        if (!plan_report.makespan.has_value()) {
            record_validation(1, attempts, false, {}, "");
            result_.failures.push_back({0, attempts, false, "plan does not reach goals", {}});
            pending_ = Message{Role::User, os_goal_feedback(), std::nullopt};
            continue;
        }
        int makespan = *plan_report.makespan;
        if (makespan > max_steps_) {
            record_validation(1, attempts, false, {}, "");
            result_.failures.push_back(
                {0, attempts, false,
                 "plan takes " + std::to_string(makespan) + " steps, bound " +
                     std::to_string(max_steps_),
                 {}});
            pending_ = Message{Role::User, os_length_feedback(makespan, max_steps_),
                               std::nullopt};
            last_failure_was_length = true;
            continue;
        }

        record_validation(1, attempts, true, {}, "");
        result_.plan = std::move(full);
        result_.status = RunStatus::Success;
        set_ratio(makespan);
        result_.iterations_per_step = {attempts};
        result_.token_log.push_back(tokens);
        return finish();
    }

    if (result_.status != RunStatus::FailBackend) {
        result_.status = last_failure_was_length ? RunStatus::FailMakespan
                                                 : RunStatus::FailIterations;
        result_.failure_detail = "no valid plan within " + std::to_string(attempts) +
                                 " attempts";
    }
    result_.iterations_per_step = {attempts};
    if (attempts > 0) result_.token_log.push_back(tokens);
    return finish();
}

}  // namespace

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Success: return "Success";
        case RunStatus::FailMakespan: return "FailMakespan";
        case RunStatus::FailIterations: return "FailIterations";
        case RunStatus::FailBackend: return "FailBackend";
    }
    return "?";
}

std::optional<RunStatus> run_status_from_string(const std::string& s) {
    if (s == "Success") return RunStatus::Success;
    if (s == "FailMakespan") return RunStatus::FailMakespan;
    if (s == "FailIterations") return RunStatus::FailIterations;
    if (s == "FailBackend") return RunStatus::FailBackend;
    return std::nullopt;
}

long long RunResult::total_prompt_tokens() const {
    long long sum = 0;
    for (const StepTokens& t : token_log) sum += t.prompt;
    return sum;
}

long long RunResult::total_completion_tokens() const {
    long long sum = 0;
    for (const StepTokens& t : token_log) sum += t.completion;
    return sum;
}

RunResult solve_sbs(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                    const SessionParams& params) {
    if (cfg.variant.mode != Mode::SBS)
        throw std::invalid_argument("solve_sbs: config variant mode is not SBS");
    LoopRunner runner(inst, cfg, backend, params);
    return runner.run();
}

RunResult solve_os(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                   const SessionParams& params) {
    if (cfg.variant.mode != Mode::OS)
        throw std::invalid_argument("solve_os: config variant mode is not OS");
    LoopRunner runner(inst, cfg, backend, params);
    return runner.run();
}

RunResult solve(const Instance& inst, const LoopConfig& cfg, ChatBackend& backend,
                const SessionParams& params) {
    LoopRunner runner(inst, cfg, backend, params);
    return runner.run();
}

}  // namespace mapf
