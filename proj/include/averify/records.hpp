#pragma once

// Serialization: JSON run records, CSV tables and the cost fixture.
//
// CSV headers are fixed strings so other tools can consume them:
//
//   sweep-detect: k,f,r,q,p_detect
//   simulate:     k,f,r,q,trials,exact_detect,empirical_detect,abs_error,
//                 three_sigma,within_3sigma
//
// Run records carry schema_version "1". "timestamp" is the only field that
// varies between otherwise identical runs.

#include <optional>
#include <string>
#include <vector>

#include "averify/bench.hpp"
#include "averify/detmath.hpp"
#include "averify/simnet.hpp"
#include "json.hpp"

namespace averify {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr const char* kSweepCsvHeader = "k,f,r,q,p_detect";
inline constexpr const char* kSimulateCsvHeader =
    "k,f,r,q,trials,exact_detect,empirical_detect,abs_error,three_sigma,"
    "within_3sigma";

json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const json& j);

json to_json(const TokenSequence& seq);
TokenSequence token_sequence_from_json(const json& j);

json to_json(const DriftSpec& drift);
DriftSpec drift_spec_from_json(const json& j);

json to_json(const Segmentation& seg);
Segmentation segmentation_from_json(const json& j);

json to_json(const TamperPlan& plan);
TamperPlan tamper_plan_from_json(const json& j);

// ground_truth_tamper goes under "simulator_only".
json to_json(const ClaimedOutput& claim);
// Rejects claims whose token count differs from the declared length.
ClaimedOutput claimed_output_from_json(const json& j);

json to_json(const CostLedger& ledger);
json to_json(const VerificationOutcome& outcome);
VerificationOutcome verification_outcome_from_json(const json& j);

json to_json(const AuditParams& params);
json to_json(const TrialOutcome& trial);
json to_json(const SimulationReport& report);

json to_json(const CostModel& model);
json to_json(const FitResult& fit);

struct RunRecord {
  std::string schema_version = kSchemaVersion;
  std::string timestamp;
  std::string tool_version = kToolVersion;
  std::string command;
  json config = json::object();
  json results = json::object();

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

json to_json(const RunRecord& record);
// Throws SchemaError for a missing or unsupported schema_version.
RunRecord run_record_from_json(const json& j);

// UTC ISO-8601 timestamp of now.
std::string utc_timestamp();

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string simulate_csv(const std::vector<SimulationReport>& reports);

// Table of measured timings. published_ratio is the ratio printed next to a
// verification row in the source table, if any.
struct CostFixtureRow {
  MeasurementRow measurement;
  bool is_full_generation = false;
  std::optional<double> published_ratio;
};

struct CostFixture {
  std::string source;
  std::size_t total_tokens = 0;
  std::vector<CostFixtureRow> rows;
};

CostFixture cost_fixture_from_json(const json& j);
json to_json(const CostFixture& fixture);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace averify
