#pragma once

#include <json.hpp>

#include "mapf/prompting.hpp"
#include "mapf/solver_loop.hpp"
#include "mapf/validator.hpp"

namespace mapf {

// Stable structured records: violations, transcripts and run results keep a
// fixed field layout so persisted results can be re-read and re-classified.

nlohmann::json to_json(Coord c);
Coord coord_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Violation& v);
Violation violation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ValidationReport& r);
ValidationReport validation_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TranscriptRecord& r);

nlohmann::json to_json(const PromptVariant& v);
PromptVariant prompt_variant_from_json(const nlohmann::json& j);

std::string variant_label(const PromptVariant& v);  // e.g. "SBS-TOM-SSO"

// One persisted run: the solving outcome plus the cell coordinates that
// produced it.
struct RunRecord {
    std::string id;
    std::string map_name;
    int scenario = 0;
    int n = 0;
    int repeat = 0;
    PromptVariant variant;
    std::string backend_kind;
    int seed = 42;
    RunStatus status = RunStatus::FailBackend;
    std::optional<int> makespan;
    std::optional<double> makespan_ratio;
    std::vector<int> iterations_per_step;
    int restarts = 0;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    std::vector<JointConfig> plan;
    int lower_bound = 0;
    int optimal_reference = 0;
    std::string optimal_reference_kind;
    std::string failure_detail;
    std::string transcript_path;
    double elapsed_seconds = 0.0;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

RunRecord make_run_record(std::string id, const std::string& map_name, int scenario, int n,
                          int repeat, const PromptVariant& variant,
                          const std::string& backend_kind, int seed, const RunResult& result);

// Transcript file: one JSON object per line; the first line is a metadata
// record carrying the instance so replays are self-contained.
void write_transcript(const std::string& path, const Instance& inst,
                      const RunRecord& header, const std::vector<TranscriptRecord>& records);

struct TranscriptFile {
    nlohmann::json meta;
    std::vector<nlohmann::json> records;
};
TranscriptFile read_transcript(const std::string& path);

}  // namespace mapf
