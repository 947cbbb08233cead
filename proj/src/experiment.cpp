#include "mapf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "mapf/bench_io.hpp"

namespace fs = std::filesystem;

namespace mapf {

using nlohmann::json;

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v, int decimals) {
    return v ? fmt(*v, decimals) : std::string("-");
}

LoopConfig loop_config_from_json(const json& j) {
    LoopConfig cfg;
    cfg.max_consecutive_failures = j.value("max_consecutive_failures", 5);
    cfg.makespan_multiplier = j.value("makespan_multiplier", 3.0);
    cfg.context_budget_tokens = j.value("context_budget_tokens", 100000LL);
    cfg.restart_on_rate_limit = j.value("restart_on_rate_limit", true);
    cfg.wall_clock_timeout =
        std::chrono::milliseconds(j.value("timeout_seconds", 1800LL) * 1000);
    cfg.map_description = j.value("map_description", "");
    return cfg;
}

BackendSpec backend_spec_from_json(const json& j) {
    BackendSpec spec;
    spec.kind = j.value("kind", "oracle");
    if (spec.kind != "oracle" && spec.kind != "scripted" && spec.kind != "http")
        throw std::runtime_error("config: unknown backend kind '" + spec.kind + "'");
    spec.responses = j.value("responses", std::vector<std::string>{});
    spec.cycle = j.value("cycle", false);
    spec.base_url = j.value("base_url", "");
    spec.model = j.value("model", "");
    spec.api_key_env = j.value("api_key_env", "MAPF_API_KEY");
    if (spec.kind == "http" && (spec.base_url.empty() || spec.model.empty()))
        throw std::runtime_error("config: http backend requires base_url and model");
    return spec;
}

struct Job {
    int scenario;
    int n;
    PromptVariant variant;
    int repeat;
};

// Sequential trajectory revisit counting per agent.
bool oscillates(const std::vector<JointConfig>& plan, int n, int revisit_threshold) {
    for (int agent = 0; agent < n; ++agent) {
        std::unordered_map<int64_t, int> visits;
        for (const JointConfig& cfg : plan) {
            if (agent >= static_cast<int>(cfg.size())) continue;
            int64_t key = (static_cast<int64_t>(cfg[agent].y) << 32) ^
                          static_cast<uint32_t>(cfg[agent].x);
            if (++visits[key] >= revisit_threshold) return true;
        }
    }
    return false;
}

}  // namespace

SuiteConfig suite_config_from_json(const json& j) {
    SuiteConfig cfg;
    cfg.map_name = j.at("map").get<std::string>();
    cfg.data_dir = j.value("data_dir", "data");
    cfg.scenarios = j.value("scenarios", std::vector<int>{1, 2, 3, 4, 5});
    cfg.agent_counts = j.at("agents").get<std::vector<int>>();
    if (cfg.scenarios.empty() || cfg.agent_counts.empty())
        throw std::runtime_error("config: scenarios and agents must be non-empty");

    if (j.contains("variants")) {
        for (const json& v : j.at("variants"))
            cfg.variants.push_back(prompt_variant_from_json(v));
    } else if (j.contains("variant_grid")) {
        const json& g = j.at("variant_grid");
        for (const auto& mode_s : g.value("modes", std::vector<std::string>{"SBS"}))
            for (const auto& enc_s :
                 g.value("map_encodings", std::vector<std::string>{"TOM"}))
                for (bool sso : g.value("sso", std::vector<bool>{true})) {
                    PromptVariant v;
                    auto mode = mode_from_string(mode_s);
                    auto enc = map_encoding_from_string(enc_s);
                    if (!mode || !enc)
                        throw std::runtime_error("config: bad variant_grid entry");
                    v.mode = *mode;
                    v.map_encoding = *enc;
                    v.sso = sso;
                    cfg.variants.push_back(v);
                }
    }
    if (cfg.variants.empty()) cfg.variants.push_back(PromptVariant{});

    cfg.backend = backend_spec_from_json(j.value("backend", json::object()));
    cfg.loop = loop_config_from_json(j.value("loop", json::object()));
    cfg.repeats = j.value("repeats", 1);
    cfg.seed = j.value("seed", 42);
    cfg.parallelism = std::max(1, j.value("parallelism", 1));
    cfg.output_dir = j.value("output_dir", "results");
    return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    return suite_config_from_json(j);
}

std::string run_id(const std::string& map_name, int scenario, int n,
                   const PromptVariant& variant, const std::string& backend_kind, int seed,
                   int repeat) {
    return map_name + "_s" + std::to_string(scenario) + "_n" + std::to_string(n) + "_" +
           variant_label(variant) + "_" + backend_kind + "_seed" + std::to_string(seed) +
           "_r" + std::to_string(repeat);
}

const char* to_string(FailureClass c) {
    switch (c) {
        case FailureClass::Oscillation: return "oscillation";
        case FailureClass::LongDetour: return "long_detour";
        case FailureClass::IterationLimit: return "iteration_limit";
        case FailureClass::Backend: return "backend";
    }
    return "?";
}

FailureClass classify_failure(const RunRecord& r, int revisit_threshold) {
    switch (r.status) {
        case RunStatus::Success:
            throw std::invalid_argument("classify_failure: run succeeded");
        case RunStatus::FailIterations:
            return FailureClass::IterationLimit;
        case RunStatus::FailBackend:
            return FailureClass::Backend;
        case RunStatus::FailMakespan:
            return oscillates(r.plan, r.n, revisit_threshold) ? FailureClass::Oscillation
                                                              : FailureClass::LongDetour;
    }
    return FailureClass::Backend;
}

SuiteReport aggregate(const std::vector<RunRecord>& records, int revisit_threshold) {
    std::map<std::tuple<std::string, int, std::string>, std::vector<const RunRecord*>> cells;
    for (const RunRecord& r : records)
        cells[{r.map_name, r.n, variant_label(r.variant)}].push_back(&r);

    SuiteReport report;
    for (const auto& [key, runs] : cells) {
        ReportCell cell;
        cell.map_name = std::get<0>(key);
        cell.n = std::get<1>(key);
        cell.variant = runs.front()->variant;
        cell.runs = static_cast<int>(runs.size());

        double iter_sum = 0, ratio_sum = 0, token_sum = 0, restart_sum = 0;
        int iter_count = 0, ratio_count = 0, token_count = 0;
        for (const RunRecord* r : runs) {
            restart_sum += r->restarts;
            if (r->status != RunStatus::Success) {
                switch (classify_failure(*r, revisit_threshold)) {
                    case FailureClass::Oscillation: ++cell.fail_oscillation; break;
                    case FailureClass::LongDetour: ++cell.fail_long_detour; break;
                    case FailureClass::IterationLimit: ++cell.fail_iteration_limit; break;
                    case FailureClass::Backend: ++cell.fail_backend; break;
                }
                continue;
            }
            ++cell.successes;
            if (!r->iterations_per_step.empty()) {
                double total = 0;
                for (int it : r->iterations_per_step) total += it;
                iter_sum += total / r->iterations_per_step.size();
                ++iter_count;
            }
            if (r->makespan_ratio) {
                ratio_sum += *r->makespan_ratio;
                ++ratio_count;
            }
            if (r->makespan && *r->makespan > 0) {
                token_sum += static_cast<double>(r->prompt_tokens + r->completion_tokens) /
                             (static_cast<double>(r->n) * *r->makespan);
                ++token_count;
            }
        }
        cell.success_rate = 100.0 * cell.successes / cell.runs;
        if (iter_count) cell.avg_iterations_per_step = iter_sum / iter_count;
        if (ratio_count) cell.avg_makespan_ratio = ratio_sum / ratio_count;
        if (token_count) cell.avg_tokens_per_agent_step = token_sum / token_count;
        cell.avg_restarts = restart_sum / cell.runs;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

std::map<int, double> token_growth_series(const std::vector<RunRecord>& records) {
    std::map<int, std::pair<double, int>> acc;
    for (const RunRecord& r : records) {
        if (r.status != RunStatus::Success || !r.makespan || *r.makespan == 0) continue;
        double per_agent_step = static_cast<double>(r.prompt_tokens + r.completion_tokens) /
                                (static_cast<double>(r.n) * *r.makespan);
        auto& [sum, count] = acc[r.n];
        sum += per_agent_step;
        ++count;
    }
    std::map<int, double> out;
    for (const auto& [n, sc] : acc) out[n] = sc.first / sc.second;
    return out;
}

std::map<int, double> SuiteReport::token_growth_series() const {
    std::map<int, std::pair<double, int>> acc;
    for (const ReportCell& c : cells) {
        if (!c.avg_tokens_per_agent_step) continue;
        auto& [sum, count] = acc[c.n];
        sum += *c.avg_tokens_per_agent_step;
        ++count;
    }
    std::map<int, double> out;
    for (const auto& [n, sc] : acc) out[n] = sc.first / sc.second;
    return out;
}

std::string SuiteReport::render_tables() const {
    std::ostringstream out;

    // Success-rate pivot per map: rows n, one column per variant.
    std::map<std::string, std::vector<const ReportCell*>> by_map;
    for (const ReportCell& c : cells) by_map[c.map_name].push_back(&c);

    for (const auto& [map_name, map_cells] : by_map) {
        std::vector<std::string> variants;
        std::vector<int> ns;
        for (const ReportCell* c : map_cells) {
            std::string label = variant_label(c->variant);
            if (std::find(variants.begin(), variants.end(), label) == variants.end())
                variants.push_back(label);
            if (std::find(ns.begin(), ns.end(), c->n) == ns.end()) ns.push_back(c->n);
        }
        std::sort(ns.begin(), ns.end());
        std::sort(variants.begin(), variants.end());

        out << "Success rate (%) on " << map_name << "\n";
        out << "  " << std::string(4, ' ');
        for (const std::string& v : variants) out << "  " << v;
        out << "\n";
        for (int n : ns) {
            char nbuf[16];
            std::snprintf(nbuf, sizeof(nbuf), "%4d", n);
            out << "  n=" << nbuf;
            for (const std::string& v : variants) {
                std::string value = "-";
                for (const ReportCell* c : map_cells)
                    if (c->n == n && variant_label(c->variant) == v)
                        value = fmt(c->success_rate, 0);
                out << "  " << std::string(v.size() > value.size() ? v.size() - value.size() : 0,
                                           ' ')
                    << value;
            }
            out << "\n";
        }
        out << "\n";
    }

    out << "Per-cell detail (averages over successes)\n";
    out << "  map                 n  variant          succ%   iter  ratio  tok/agstep  "
           "restarts  osc  detour  iterlim  backend\n";
    for (const ReportCell& c : cells) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "  %-18s %4d  %-15s %6s %6s %6s  %10s  %8s  %3d  %6d  %7d  %7d\n",
                      c.map_name.c_str(), c.n, variant_label(c.variant).c_str(),
                      fmt(c.success_rate, 0).c_str(),
                      opt_fmt(c.avg_iterations_per_step, 2).c_str(),
                      opt_fmt(c.avg_makespan_ratio, 2).c_str(),
                      opt_fmt(c.avg_tokens_per_agent_step, 1).c_str(),
                      fmt(c.avg_restarts, 2).c_str(), c.fail_oscillation, c.fail_long_detour,
                      c.fail_iteration_limit, c.fail_backend);
        out << line;
    }
    return out.str();
}

std::string SuiteReport::render_csv() const {
    std::ostringstream out;
    out << "map,n,mode,map_encoding,sso,runs,successes,success_rate,avg_iterations_per_step,"
           "avg_makespan_ratio,avg_tokens_per_agent_step,avg_restarts,fail_oscillation,"
           "fail_long_detour,fail_iteration_limit,fail_backend\n";
    for (const ReportCell& c : cells) {
        out << c.map_name << "," << c.n << "," << to_string(c.variant.mode) << ","
            << to_string(c.variant.map_encoding) << "," << (c.variant.sso ? 1 : 0) << ","
            << c.runs << "," << c.successes << "," << fmt(c.success_rate, 2) << ","
            << opt_fmt(c.avg_iterations_per_step, 4) << ","
            << opt_fmt(c.avg_makespan_ratio, 4) << ","
            << opt_fmt(c.avg_tokens_per_agent_step, 4) << "," << fmt(c.avg_restarts, 4) << ","
            << c.fail_oscillation << "," << c.fail_long_detour << "," << c.fail_iteration_limit
            << "," << c.fail_backend << "\n";
    }
    return out.str();
}

std::vector<RunRecord> load_results(const std::string& results_dir) {
    if (!fs::exists(results_dir))
        throw std::runtime_error("no results found: " + results_dir + " does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(results_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<RunRecord> records;
    for (const fs::path& p : files) {
        std::ifstream f(p);
        json j;
        try {
            f >> j;
            records.push_back(run_record_from_json(j));
        } catch (const std::exception& e) {
            throw std::runtime_error("bad result file " + p.string() + ": " + e.what());
        }
    }
    if (records.empty()) throw std::runtime_error("no results found in " + results_dir);
    return records;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
    GridMap map = load_map_file(map_path(cfg.data_dir, cfg.map_name));
    std::unordered_map<int, std::vector<ScenEntry>> scen_cache;
    for (int s : cfg.scenarios)
        scen_cache[s] = load_scen_file(scen_path(cfg.data_dir, cfg.map_name, s), map);

    fs::create_directories(fs::path(cfg.output_dir) / "runs");
    fs::create_directories(fs::path(cfg.output_dir) / "transcripts");

    std::vector<Job> jobs;
    for (int scenario : cfg.scenarios)
        for (int n : cfg.agent_counts)
            for (const PromptVariant& variant : cfg.variants)
                for (int repeat = 0; repeat < cfg.repeats; ++repeat)
                    jobs.push_back({scenario, n, variant, repeat});

    // The http transport is shared (it is safe across sessions); oracle and
    // scripted backends carry per-run state and are built per job.
    std::shared_ptr<HttpChatBackend> http;
    if (cfg.backend.kind == "http") {
        HttpChatConfig hc;
        hc.base_url = cfg.backend.base_url;
        hc.model = cfg.backend.model;
        hc.api_key_env = cfg.backend.api_key_env;
        http = std::make_shared<HttpChatBackend>(hc);
    }

    std::atomic<size_t> next_job{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        while (true) {
            size_t idx = next_job.fetch_add(1);
            if (idx >= jobs.size()) return;
            const Job& job = jobs[idx];
            std::string id = run_id(cfg.map_name, job.scenario, job.n, job.variant,
                                    cfg.backend.kind, cfg.seed, job.repeat);
            fs::path record_path = fs::path(cfg.output_dir) / "runs" / (id + ".json");
            if (fs::exists(record_path)) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << "skip (done): " << id << "\n";
                continue;
            }

            RunRecord record;
            std::optional<Instance> inst;
            try {
                inst = make_instance(map, scen_cache.at(job.scenario), job.n);
                LoopConfig loop = cfg.loop;
                loop.variant = job.variant;

                std::unique_ptr<ChatBackend> owned;
                ChatBackend* backend = nullptr;
                if (cfg.backend.kind == "oracle") {
                    owned = std::make_unique<OracleAgentBackend>(map, job.variant.mode);
                    backend = owned.get();
                } else if (cfg.backend.kind == "scripted") {
                    owned = std::make_unique<ScriptedBackend>(cfg.backend.responses,
                                                              cfg.backend.cycle);
                    backend = owned.get();
                } else {
                    backend = http.get();
                }

                SessionParams params;
                params.model_id = cfg.backend.model;
                params.seed = cfg.seed;
                RunResult result = solve(*inst, loop, *backend, params);

                record = make_run_record(id, cfg.map_name, job.scenario, job.n, job.repeat,
                                         job.variant, cfg.backend.kind, cfg.seed, result);
                fs::path transcript_path =
                    fs::path(cfg.output_dir) / "transcripts" / (id + ".jsonl");
                write_transcript(transcript_path.string(), *inst, record, result.transcript);
                record.transcript_path = transcript_path.string();
            } catch (const std::exception& e) {
                record = RunRecord{};
                record.id = id;
                record.map_name = cfg.map_name;
                record.scenario = job.scenario;
                record.n = job.n;
                record.repeat = job.repeat;
                record.variant = job.variant;
                record.backend_kind = cfg.backend.kind;
                record.seed = cfg.seed;
                record.status = RunStatus::FailBackend;
                record.failure_detail = e.what();
            }

            fs::path tmp = record_path;
            tmp += ".tmp";
            {
                std::ofstream f(tmp);
                f << to_json(record).dump(2) << "\n";
            }
            fs::rename(tmp, record_path);
            {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << id << ": " << to_string(record.status)
                          << (record.makespan ? " makespan " + std::to_string(*record.makespan)
                                              : std::string())
                          << "\n";
            }
        }
    };

    std::vector<std::thread> pool;
    for (int i = 0; i < cfg.parallelism; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    // Aggregate exactly this suite's cells from the persisted records.
    std::vector<RunRecord> records;
    for (const Job& job : jobs) {
        std::string id = run_id(cfg.map_name, job.scenario, job.n, job.variant,
                                cfg.backend.kind, cfg.seed, job.repeat);
        fs::path record_path = fs::path(cfg.output_dir) / "runs" / (id + ".json");
        std::ifstream f(record_path);
        if (!f) throw std::runtime_error("missing result after run: " + record_path.string());
        json j;
        f >> j;
        records.push_back(run_record_from_json(j));
    }
    return aggregate(records);
}

}  // namespace mapf
