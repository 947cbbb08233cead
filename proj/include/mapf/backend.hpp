#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapf/prompting.hpp"
#include "mapf/search.hpp"

namespace mapf {

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Rate limits get their own type: the solving loop reacts by restarting the
// session instead of failing the run.
struct RateLimitError : BackendError {
    using BackendError::BackendError;
};
struct ScriptExhaustedError : BackendError {
    using BackendError::BackendError;
};

struct Usage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long total() const { return prompt_tokens + completion_tokens; }
    Usage& operator+=(const Usage& o) {
        prompt_tokens += o.prompt_tokens;
        completion_tokens += o.completion_tokens;
        return *this;
    }
};

struct BackendReply {
    std::string text;
    std::optional<Usage> usage;  // provider-reported; absent -> estimated
};

struct SessionParams {
    std::string model_id;
    double temperature = 1.0;
    int seed = 42;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // `history` is the full conversation including the message being asked
    // about (chat-completion style: the transport is stateless).
    virtual BackendReply complete(const std::vector<Message>& history,
                                  const SessionParams& params) = 0;
    virtual std::string kind() const = 0;
};

// Deterministic token approximation: ceil(characters / 4). Used for
// budgeting and per-step metrics whenever the provider reports no usage.
long long estimate_tokens(std::string_view text);

// tokens_per_agent_step * steps * agents; the context-size back-of-envelope.
long long context_estimate(long long tokens_per_agent_step, long long steps,
                           long long agents);

// One conversation. History alternates user/assistant after the single
// leading system message; cumulative usage never decreases.
class ChatSession {
public:
    ChatSession(ChatBackend& backend, SessionParams params);

    void set_system(Message msg);  // must precede the first send
    // Appends msg and the reply; returns the reply text. Usage grows by the
    // provider-reported counts when available, else by estimate_tokens over
    // the sent history and the reply.
    std::string send(Message msg);

    const std::vector<Message>& history() const { return history_; }
    const Usage& usage() const { return usage_; }
    const Usage& last_delta() const { return last_delta_; }
    const SessionParams& params() const { return params_; }

private:
    ChatBackend* backend_;
    SessionParams params_;
    std::vector<Message> history_;
    Usage usage_;
    Usage last_delta_;
};

// Canned responses, consumed in order; exhaustion raises
// ScriptExhaustedError unless `cycle` keeps replaying the list.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses, bool cycle = false);

    BackendReply complete(const std::vector<Message>& history,
                          const SessionParams& params) override;
    std::string kind() const override { return "scripted"; }
    size_t consumed() const { return consumed_; }

private:
    std::vector<std::string> responses_;
    bool cycle_;
    size_t next_ = 0;
    size_t consumed_ = 0;
};

// A correctness witness standing in for the model: answers every scenario
// prompt with the classic planner's next step (or whole plan in OS mode),
// formatted exactly like the required output. It recovers current positions
// and goals from the scenario prompt itself, so session restarts re-plan
// from wherever the agents are.
class OracleAgentBackend : public ChatBackend {
public:
    explicit OracleAgentBackend(GridMap map, Mode mode = Mode::SBS);

    BackendReply complete(const std::vector<Message>& history,
                          const SessionParams& params) override;
    std::string kind() const override { return "oracle"; }

private:
    GridMap map_;
    Mode mode_;
    Plan plan_;
    size_t next_step_ = 0;
    bool has_plan_ = false;

    void replan(const std::string& scenario_text);
    std::string current_step_text() const;
};

// Shared minimum spacing between requests across sessions of one provider.
class RateLimiter {
public:
    explicit RateLimiter(std::chrono::milliseconds min_interval);
    void acquire();

private:
    std::chrono::milliseconds min_interval_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_;
};

struct HttpChatConfig {
    std::string base_url;  // e.g. "https://api.openai.com" or an http://host:port
    std::string path = "/v1/chat/completions";
    std::string model;     // required, no default
    std::string api_key_env = "MAPF_API_KEY";
    int max_retries = 4;                               // transient transport failures
    std::chrono::milliseconds initial_backoff{250};    // doubles per retry
    std::chrono::seconds request_timeout{120};
    std::shared_ptr<RateLimiter> rate_limiter;         // optional
};

// Chat-completions wire format over HTTP(S). 429 responses raise
// RateLimitError immediately; 5xx and transport errors retry with bounded
// exponential backoff. The API key is read from the configured environment
// variable and never logged.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpChatConfig config);

    BackendReply complete(const std::vector<Message>& history,
                          const SessionParams& params) override;
    std::string kind() const override { return "http"; }

    // Exposed for tests: the exact JSON request body.
    static std::string build_request_body(const std::vector<Message>& history,
                                          const SessionParams& params,
                                          const std::string& model);

private:
    HttpChatConfig config_;
};

}  // namespace mapf
