#include "mapf/serialize.hpp"

#include <fstream>

#include "mapf/bench_io.hpp"

namespace mapf {

using nlohmann::json;

json to_json(Coord c) { return json::array({c.x, c.y}); }

Coord coord_from_json(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json to_json(const Violation& v) {
    if (const auto* oob = std::get_if<OutOfBounds>(&v))
        return {{"kind", "out_of_bounds"}, {"agents", {oob->agent}}, {"cell", to_json(oob->cell)}};
    if (const auto* im = std::get_if<IllegalMove>(&v))
        return {{"kind", "illegal_move"},
                {"agents", {im->agent}},
                {"from", to_json(im->from)},
                {"to", to_json(im->to)}};
    if (const auto* oc = std::get_if<ObstacleCollision>(&v))
        return {{"kind", "obstacle_collision"}, {"agents", oc->agents}};
    const auto& vc = std::get<VertexConflict>(v);
    return {{"kind", "vertex_conflict"}, {"agents", vc.agents}, {"cell", to_json(vc.cell)}};
}

Violation violation_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "out_of_bounds")
        return OutOfBounds{j.at("agents").at(0).get<int>(), coord_from_json(j.at("cell"))};
    if (kind == "illegal_move")
        return IllegalMove{j.at("agents").at(0).get<int>(), coord_from_json(j.at("from")),
                           coord_from_json(j.at("to"))};
    if (kind == "obstacle_collision")
        return ObstacleCollision{j.at("agents").get<std::vector<int>>()};
    if (kind == "vertex_conflict")
        return VertexConflict{j.at("agents").get<std::vector<int>>(),
                              coord_from_json(j.at("cell"))};
    throw std::runtime_error("unknown violation kind: " + kind);
}

json to_json(const ValidationReport& r) {
    json violations = json::array();
    for (const Violation& v : r.violations) violations.push_back(to_json(v));
    return {{"valid", r.valid()}, {"violations", violations}};
}

ValidationReport validation_report_from_json(const json& j) {
    ValidationReport r;
    for (const json& v : j.at("violations")) r.violations.push_back(violation_from_json(v));
    return r;
}

json to_json(const TranscriptRecord& r) {
    json j = {{"kind", r.kind},       {"session", r.session}, {"step", r.step},
              {"iteration", r.iteration}, {"ts_ms", r.ts_ms}};
    if (r.kind == "message") {
        j["role"] = r.role;
        j["text"] = r.text;
        if (r.has_image) j["has_image"] = true;
        if (r.role == "assistant") {
            j["prompt_tokens"] = r.prompt_tokens;
            j["completion_tokens"] = r.completion_tokens;
        }
    } else {
        j["valid"] = r.valid;
        json violations = json::array();
        for (const Violation& v : r.violations) violations.push_back(to_json(v));
        j["violations"] = violations;
        if (!r.parse_error.empty()) j["parse_error"] = r.parse_error;
    }
    return j;
}

json to_json(const PromptVariant& v) {
    return {{"mode", to_string(v.mode)},
            {"map_encoding", to_string(v.map_encoding)},
            {"sso", v.sso}};
}

PromptVariant prompt_variant_from_json(const json& j) {
    PromptVariant v;
    if (j.contains("mode")) {
        auto mode = mode_from_string(j.at("mode").get<std::string>());
        if (!mode) throw std::runtime_error("bad mode: " + j.at("mode").get<std::string>());
        v.mode = *mode;
    }
    if (j.contains("map_encoding")) {
        auto enc = map_encoding_from_string(j.at("map_encoding").get<std::string>());
        if (!enc)
            throw std::runtime_error("bad map_encoding: " +
                                     j.at("map_encoding").get<std::string>());
        v.map_encoding = *enc;
    }
    v.sso = j.value("sso", true);
    return v;
}

std::string variant_label(const PromptVariant& v) {
    std::string label = to_string(v.mode);
    label += "-";
    label += to_string(v.map_encoding);
    label += v.sso ? "-SSO" : "-noSSO";
    return label;
}

json to_json(const RunRecord& r) {
    json plan = json::array();
    for (const JointConfig& cfg : r.plan) {
        json step = json::array();
        for (const Coord& c : cfg) step.push_back(to_json(c));
        plan.push_back(step);
    }
    json j = {{"id", r.id},
              {"map", r.map_name},
              {"scenario", r.scenario},
              {"n", r.n},
              {"repeat", r.repeat},
              {"variant", to_json(r.variant)},
              {"backend", r.backend_kind},
              {"seed", r.seed},
              {"status", to_string(r.status)},
              {"iterations_per_step", r.iterations_per_step},
              {"restarts", r.restarts},
              {"prompt_tokens", r.prompt_tokens},
              {"completion_tokens", r.completion_tokens},
              {"plan", plan},
              {"lower_bound", r.lower_bound},
              {"optimal_reference", r.optimal_reference},
              {"optimal_reference_kind", r.optimal_reference_kind},
              {"elapsed_seconds", r.elapsed_seconds}};
    if (r.makespan) j["makespan"] = *r.makespan;
    if (r.makespan_ratio) j["makespan_ratio"] = *r.makespan_ratio;
    if (!r.failure_detail.empty()) j["failure_detail"] = r.failure_detail;
    if (!r.transcript_path.empty()) j["transcript"] = r.transcript_path;
    return j;
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.id = j.at("id").get<std::string>();
    r.map_name = j.at("map").get<std::string>();
    r.scenario = j.at("scenario").get<int>();
    r.n = j.at("n").get<int>();
    r.repeat = j.value("repeat", 0);
    r.variant = prompt_variant_from_json(j.at("variant"));
    r.backend_kind = j.value("backend", "");
    r.seed = j.value("seed", 42);
    auto status = run_status_from_string(j.at("status").get<std::string>());
    if (!status) throw std::runtime_error("bad status: " + j.at("status").get<std::string>());
    r.status = *status;
    if (j.contains("makespan")) r.makespan = j.at("makespan").get<int>();
    if (j.contains("makespan_ratio")) r.makespan_ratio = j.at("makespan_ratio").get<double>();
    r.iterations_per_step = j.value("iterations_per_step", std::vector<int>{});
    r.restarts = j.value("restarts", 0);
    r.prompt_tokens = j.value("prompt_tokens", 0LL);
    r.completion_tokens = j.value("completion_tokens", 0LL);
    for (const json& step : j.value("plan", json::array())) {
        JointConfig cfg;
        for (const json& c : step) cfg.push_back(coord_from_json(c));
        r.plan.push_back(std::move(cfg));
    }
    r.lower_bound = j.value("lower_bound", 0);
    r.optimal_reference = j.value("optimal_reference", 0);
    r.optimal_reference_kind = j.value("optimal_reference_kind", "");
    r.failure_detail = j.value("failure_detail", "");
    r.transcript_path = j.value("transcript", "");
    r.elapsed_seconds = j.value("elapsed_seconds", 0.0);
    return r;
}

RunRecord make_run_record(std::string id, const std::string& map_name, int scenario, int n,
                          int repeat, const PromptVariant& variant,
                          const std::string& backend_kind, int seed,
                          const RunResult& result) {
    RunRecord r;
    r.id = std::move(id);
    r.map_name = map_name;
    r.scenario = scenario;
    r.n = n;
    r.repeat = repeat;
    r.variant = variant;
    r.backend_kind = backend_kind;
    r.seed = seed;
    r.status = result.status;
    r.makespan = result.makespan;
    r.makespan_ratio = result.makespan_ratio;
    r.iterations_per_step = result.iterations_per_step;
    r.restarts = result.restarts;
    r.prompt_tokens = result.total_prompt_tokens();
    r.completion_tokens = result.total_completion_tokens();
    r.plan = result.plan;
    r.lower_bound = result.lower_bound;
    r.optimal_reference = result.optimal_reference;
    r.optimal_reference_kind = result.optimal_reference_kind;
    r.failure_detail = result.failure_detail;
    r.elapsed_seconds = result.elapsed_seconds;
    return r;
}

void write_transcript(const std::string& path, const Instance& inst, const RunRecord& header,
                      const std::vector<TranscriptRecord>& records) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write transcript: " + path);
    json starts = json::array(), goals = json::array();
    for (const Coord& c : inst.starts()) starts.push_back(to_json(c));
    for (const Coord& c : inst.goals()) goals.push_back(to_json(c));
    json meta = {{"kind", "meta"},
                 {"id", header.id},
                 {"map", header.map_name},
                 {"map_ascii", render_ascii(inst.map())},
                 {"scenario", header.scenario},
                 {"n", header.n},
                 {"variant", to_json(header.variant)},
                 {"backend", header.backend_kind},
                 {"seed", header.seed},
                 {"starts", starts},
                 {"goals", goals}};
    f << meta.dump() << "\n";
    for (const TranscriptRecord& r : records) f << to_json(r).dump() << "\n";
}

TranscriptFile read_transcript(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open transcript: " + path);
    TranscriptFile out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.value("kind", "") == "meta" && out.meta.is_null())
            out.meta = j;
        else
            out.records.push_back(std::move(j));
    }
    if (out.meta.is_null()) throw std::runtime_error("transcript has no meta record: " + path);
    return out;
}

}  // namespace mapf
