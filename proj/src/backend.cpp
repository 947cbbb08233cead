#include "mapf/backend.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

namespace mapf {

using nlohmann::json;

long long estimate_tokens(std::string_view text) {
    return (static_cast<long long>(text.size()) + 3) / 4;
}

long long context_estimate(long long tokens_per_agent_step, long long steps,
                           long long agents) {
    if (tokens_per_agent_step < 0 || steps < 0 || agents < 0)
        throw std::invalid_argument("context_estimate: negative input");
    return tokens_per_agent_step * steps * agents;
}

ChatSession::ChatSession(ChatBackend& backend, SessionParams params)
    : backend_(&backend), params_(std::move(params)) {}

void ChatSession::set_system(Message msg) {
    if (!history_.empty())
        throw std::logic_error("ChatSession: system message must come first");
    msg.role = Role::System;
    history_.push_back(std::move(msg));
}

std::string ChatSession::send(Message msg) {
    msg.role = Role::User;
    history_.push_back(std::move(msg));
    BackendReply reply;
    try {
        reply = backend_->complete(history_, params_);
    } catch (...) {
        history_.pop_back();  // a failed send leaves the history unchanged
        throw;
    }
    if (reply.usage) {
        last_delta_ = *reply.usage;
    } else {
        long long sent = 0;
        for (const Message& h : history_) sent += estimate_tokens(h.text);
        last_delta_ = {sent, estimate_tokens(reply.text)};
    }
    usage_ += last_delta_;
    history_.push_back(Message{Role::Assistant, reply.text, std::nullopt});
    return history_.back().text;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, bool cycle)
    : responses_(std::move(responses)), cycle_(cycle) {}

BackendReply ScriptedBackend::complete(const std::vector<Message>&, const SessionParams&) {
    if (next_ >= responses_.size()) {
        if (!cycle_ || responses_.empty())
            throw ScriptExhaustedError("scripted backend: out of responses after " +
                                       std::to_string(consumed_));
        next_ = 0;
    }
    ++consumed_;
    return {responses_[next_++], std::nullopt};
}

OracleAgentBackend::OracleAgentBackend(GridMap map, Mode mode)
    : map_(std::move(map)), mode_(mode) {}

void OracleAgentBackend::replan(const std::string& scenario_text) {
    static const std::regex agent_re(
        R"(Agent\s+(\d+) is currently in \((-?\d+),(-?\d+)\), and wants to go to \((-?\d+),(-?\d+)\)\.)");
    std::vector<Coord> starts, goals;
    auto begin = std::sregex_iterator(scenario_text.begin(), scenario_text.end(), agent_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        size_t agent = std::stoul(m[1]);
        if (agent != starts.size() + 1)
            throw BackendError("oracle: scenario lines out of order");
        starts.push_back({std::stoi(m[2]), std::stoi(m[3])});
        goals.push_back({std::stoi(m[4]), std::stoi(m[5])});
    }
    if (starts.empty()) throw BackendError("oracle: no agent lines in scenario prompt");

    Instance inst(map_, std::move(starts), std::move(goals));
    auto plan = prioritized_plan_restarts(inst, 8, 1);
    if (!plan) throw BackendError("oracle: planner found no solution");
    plan_ = std::move(*plan);
    next_step_ = plan_.steps.size() > 1 ? 1 : 0;
    has_plan_ = true;
}

std::string OracleAgentBackend::current_step_text() const {
    if (mode_ == Mode::OS) {
        std::string out = "Here is the validated plan:\n";
        for (size_t t = 1; t < plan_.steps.size(); ++t) {
            out += "\nStep " + std::to_string(t) + ":\n";
            out += format_solution_block(plan_.steps[t]);
        }
        if (plan_.steps.size() == 1) {
            out += "\nStep 1:\n" + format_solution_block(plan_.steps[0]);
        }
        return out;
    }
    const JointConfig& cfg = plan_.steps[std::min(next_step_, plan_.steps.size() - 1)];
    return "There is no collision. Here is the validated solution:\n\n" +
           format_solution_block(cfg);
}

BackendReply OracleAgentBackend::complete(const std::vector<Message>& history,
                                          const SessionParams&) {
    const Message* last_user = nullptr;
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role == Role::User) {
            last_user = &*it;
            break;
        }
    }
    if (!last_user) throw BackendError("oracle: no user message");

    if (last_user->text.find("is currently in") != std::string::npos) {
        replan(last_user->text);  // first prompt of a session, or a restart
    } else if (!has_plan_) {
        throw BackendError("oracle: feedback received before any scenario prompt");
    } else if (last_user->text.rfind("Good job", 0) == 0) {
        ++next_step_;
    }
    // On corrective feedback ("You are wrong. ...") the same step is
    // re-emitted; the oracle's steps are always valid, so this only guards
    // against misuse.
    return {current_step_text(), std::nullopt};
}

RateLimiter::RateLimiter(std::chrono::milliseconds min_interval)
    : min_interval_(min_interval), last_(std::chrono::steady_clock::now() - min_interval) {}

void RateLimiter::acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    auto now = std::chrono::steady_clock::now();
    auto ready = last_ + min_interval_;
    if (now < ready) {
        std::this_thread::sleep_for(ready - now);
        now = std::chrono::steady_clock::now();
    }
    last_ = now;
}

HttpChatBackend::HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw std::invalid_argument("HttpChatBackend: base_url required");
    if (config_.model.empty()) throw std::invalid_argument("HttpChatBackend: model required");
}

std::string HttpChatBackend::build_request_body(const std::vector<Message>& history,
                                                const SessionParams& params,
                                                const std::string& model) {
    json messages = json::array();
    for (const Message& m : history) {
        const char* role = m.role == Role::System ? "system"
                           : m.role == Role::User ? "user"
                                                  : "assistant";
        if (m.image) {
            json content = json::array();
            if (!m.text.empty()) content.push_back({{"type", "text"}, {"text", m.text}});
            std::string data_uri =
                "data:image/png;base64," + base64_encode(encode_png(*m.image));
            content.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", data_uri}}}});
            messages.push_back({{"role", role}, {"content", content}});
        } else {
            messages.push_back({{"role", role}, {"content", m.text}});
        }
    }
    json body = {{"model", model},
                 {"temperature", params.temperature},
                 {"seed", params.seed},
                 {"messages", messages}};
    return body.dump();
}

BackendReply HttpChatBackend::complete(const std::vector<Message>& history,
                                       const SessionParams& params) {
    std::string model = params.model_id.empty() ? config_.model : params.model_id;
    std::string body = build_request_body(history, params, model);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto backoff = config_.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        if (config_.rate_limiter) config_.rate_limiter->acquire();

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(config_.request_timeout.count(), 0);
        auto res = client.Post(config_.path, headers, body, "application/json");

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429)
            throw RateLimitError("rate limited by provider (429)");
        if (res->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);

        json parsed;
        try {
            parsed = json::parse(res->body);
            BackendReply reply;
            reply.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            if (parsed.contains("usage")) {
                Usage u;
                u.prompt_tokens = parsed["usage"].value("prompt_tokens", 0LL);
                u.completion_tokens = parsed["usage"].value("completion_tokens", 0LL);
                reply.usage = u;
            }
            return reply;
        } catch (const json::exception& e) {
            throw BackendError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw BackendError("request failed after " + std::to_string(config_.max_retries + 1) +
                       " attempts; last: " + last_error);
}

}  // namespace mapf
