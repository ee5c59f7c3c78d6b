#include "averify/records.hpp"

#include <chrono>
#include <ctime>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "averify/error.hpp"

namespace averify {

namespace {

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

json span_json(const Span& s) { return json::array({s.start, s.end}); }

Span span_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw SchemaError("span must be a [start, end] pair");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

json to_json(const ModelConfig& c) {
  return {{"model_id", c.model_id},
          {"seed", c.seed},
          {"vocab_size", c.vocab_size},
          {"max_output", c.max_output}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.model_id = required<std::string>(j, "model_id");
  c.seed = required<std::uint64_t>(j, "seed");
  c.vocab_size = required<std::uint32_t>(j, "vocab_size");
  c.max_output = required<std::uint32_t>(j, "max_output");
  c.validate();
  return c;
}

json to_json(const TokenSequence& seq) {
  return {{"role", to_string(seq.role)}, {"tokens", seq.tokens}};
}

TokenSequence token_sequence_from_json(const json& j) {
  TokenSequence seq;
  seq.role = sequence_role_from_string(required<std::string>(j, "role"));
  seq.tokens = required<std::vector<TokenId>>(j, "tokens");
  return seq;
}

json to_json(const DriftSpec& d) {
  return {{"flip_probability", d.flip_probability},
          {"drift_seed", d.drift_seed}};
}

DriftSpec drift_spec_from_json(const json& j) {
  DriftSpec d;
  d.flip_probability = required<double>(j, "flip_probability");
  d.drift_seed = required<std::uint64_t>(j, "drift_seed");
  d.validate();
  return d;
}

json to_json(const Segmentation& seg) {
  json spans = json::array();
  for (const auto& s : seg.spans) spans.push_back(span_json(s));
  return {{"total_len", seg.total_len}, {"k", seg.k()}, {"spans", spans}};
}

Segmentation segmentation_from_json(const json& j) {
  Segmentation seg;
  seg.total_len = required<std::size_t>(j, "total_len");
  for (const auto& s : required<json>(j, "spans")) {
    seg.spans.push_back(span_from_json(s));
  }
  if (required<std::size_t>(j, "k") != seg.k()) {
    throw SchemaError("segment count does not match span list");
  }
  seg.validate();
  return seg;
}

json to_json(const TamperPlan& plan) {
  json source;
  if (const auto* alt = std::get_if<AltModelSource>(&plan.replacement_source)) {
    source = {{"kind", "alt_model"}, {"model", to_json(alt->model)}};
  } else {
    source = {
        {"kind", "fixed_payload"},
        {"payload",
         to_json(std::get<FixedPayloadSource>(plan.replacement_source).payload)}};
  }
  return {{"strategy", to_string(plan.strategy)},
          {"tampered_indices", plan.tampered_indices},
          {"replacement_source", source},
          {"suffix", to_string(plan.suffix)}};
}

TamperPlan tamper_plan_from_json(const json& j) {
  TamperPlan plan;
  plan.strategy =
      tamper_strategy_from_string(required<std::string>(j, "strategy"));
  plan.tampered_indices =
      required<std::vector<std::size_t>>(j, "tampered_indices");
  if (j.contains("suffix")) {
    plan.suffix = suffix_policy_from_string(j.at("suffix").get<std::string>());
  }
  const auto source = required<json>(j, "replacement_source");
  const auto kind = required<std::string>(source, "kind");
  if (kind == "alt_model") {
    plan.replacement_source =
        AltModelSource{model_config_from_json(required<json>(source, "model"))};
  } else if (kind == "fixed_payload") {
    plan.replacement_source = FixedPayloadSource{
        token_sequence_from_json(required<json>(source, "payload"))};
  } else {
    throw SchemaError("unknown replacement source '" + kind + "'");
  }
  return plan;
}

json to_json(const ClaimedOutput& claim) {
  json j = {{"prompt", to_json(claim.prompt)},
            {"claimed_config", to_json(claim.claimed_config)},
            {"tokens", to_json(claim.tokens)},
            {"segmentation", to_json(claim.segmentation)}};
  if (claim.ground_truth_tamper) {
    j["simulator_only"] = {
        {"ground_truth_tamper", to_json(*claim.ground_truth_tamper)}};
  }
  return j;
}

ClaimedOutput claimed_output_from_json(const json& j) {
  ClaimedOutput claim;
  claim.prompt = token_sequence_from_json(required<json>(j, "prompt"));
  claim.claimed_config =
      model_config_from_json(required<json>(j, "claimed_config"));
  claim.tokens = token_sequence_from_json(required<json>(j, "tokens"));
  claim.segmentation = segmentation_from_json(required<json>(j, "segmentation"));
  if (claim.tokens.size() != claim.segmentation.total_len) {
    throw SchemaError("claim carries " + std::to_string(claim.tokens.size()) +
                      " tokens but declares " +
                      std::to_string(claim.segmentation.total_len));
  }
  if (j.contains("simulator_only")) {
    const auto& sim = j.at("simulator_only");
    if (sim.contains("ground_truth_tamper")) {
      claim.ground_truth_tamper =
          tamper_plan_from_json(sim.at("ground_truth_tamper"));
    }
  }
  try {
    claim.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return claim;
}

json to_json(const CostLedger& l) {
  return {{"prefill_tokens", l.prefill_tokens},
          {"decode_tokens", l.decode_tokens}};
}

json to_json(const VerificationOutcome& o) {
  return {{"verdict", to_string(o.verdict)},
          {"first_mismatch",
           o.first_mismatch ? json(*o.first_mismatch) : json(nullptr)},
          {"checked_span", span_json(o.checked_span)},
          {"cost", to_json(o.cost)}};
}

VerificationOutcome verification_outcome_from_json(const json& j) {
  VerificationOutcome o;
  const auto verdict = required<std::string>(j, "verdict");
  if (verdict != "match" && verdict != "mismatch") {
    throw SchemaError("unknown verdict '" + verdict + "'");
  }
  o.verdict = verdict == "match" ? Verdict::match : Verdict::mismatch;
  const auto& fm = required<json>(j, "first_mismatch");
  if (!fm.is_null()) o.first_mismatch = fm.get<std::size_t>();
  o.checked_span = span_from_json(required<json>(j, "checked_span"));
  const auto cost = required<json>(j, "cost");
  o.cost.prefill_tokens = required<std::size_t>(cost, "prefill_tokens");
  o.cost.decode_tokens = required<std::size_t>(cost, "decode_tokens");
  if ((o.verdict == Verdict::mismatch) != o.first_mismatch.has_value()) {
    throw SchemaError("verdict and first_mismatch disagree");
  }
  return o;
}

json to_json(const AuditParams& p) {
  return {{"k", p.k}, {"f", p.f}, {"r", p.r}, {"q", p.q}};
}

json to_json(const TrialOutcome& t) {
  json validators = json::array();
  for (const auto& v : t.per_validator_outcomes) {
    json outcomes = json::array();
    for (const auto& o : v.outcomes) outcomes.push_back(to_json(o));
    validators.push_back({{"validator_id", v.assignment.validator_id},
                          {"chosen_segments", v.assignment.chosen_segments},
                          {"rng_seed", v.assignment.rng_seed},
                          {"detected", v.detected},
                          {"outcomes", outcomes}});
  }
  json broadcast = nullptr;
  if (t.broadcast) {
    broadcast = {{"validator_id", t.broadcast->validator_id},
                 {"segment_index", t.broadcast->segment_index},
                 {"first_mismatch", t.broadcast->first_mismatch
                                        ? json(*t.broadcast->first_mismatch)
                                        : json(nullptr)}};
  }
  return {{"trial_id", t.trial_id},
          {"detected", t.detected},
          {"rejected", t.rejected},
          {"detecting_validators", t.detecting_validators},
          {"broadcast", broadcast},
          {"validators", validators},
          {"total_cost", to_json(t.total_cost)}};
}

json to_json(const SimulationReport& r) {
  json j = {{"params", to_json(r.params)},
            {"mode", to_string(r.mode)},
            {"trials", r.trials},
            {"detected_count", r.detected_count},
            {"empirical_detect", r.empirical_detect},
            {"exact_detect", r.exact_detect},
            {"abs_error", r.abs_error},
            {"three_sigma", r.three_sigma},
            {"within_3sigma", r.within_three_sigma()},
            {"master_seed", r.master_seed},
            {"total_cost", to_json(r.total_cost)}};
  if (!r.trial_outcomes.empty()) {
    json trials = json::array();
    for (const auto& t : r.trial_outcomes) trials.push_back(to_json(t));
    j["trial_outcomes"] = trials;
  }
  return j;
}

json to_json(const CostModel& m) {
  return {{"fixed_overhead_s", m.fixed_overhead_s},
          {"decode_rate_s", m.decode_rate_s},
          {"prefill_rate_s", m.prefill_rate_s}};
}

json to_json(const FitResult& f) {
  return {{"model", to_json(f.model)},
          {"prefill_fitted", f.prefill_fitted},
          {"degenerate", f.degenerate},
          {"degeneracy_note", f.degeneracy_note},
          {"rank", f.rank},
          {"r_squared", f.r_squared},
          {"predicted", f.predicted},
          {"relative_residuals", f.relative_residuals}};
}

json to_json(const RunRecord& r) {
  return {{"schema_version", r.schema_version},
          {"timestamp", r.timestamp},
          {"tool_version", r.tool_version},
          {"command", r.command},
          {"config", r.config},
          {"results", r.results}};
}

RunRecord run_record_from_json(const json& j) {
  const auto version = required<std::string>(j, "schema_version");
  if (version != kSchemaVersion) {
    throw SchemaError("unsupported schema_version '" + version + "'");
  }
  RunRecord r;
  r.schema_version = version;
  r.timestamp = required<std::string>(j, "timestamp");
  r.tool_version = required<std::string>(j, "tool_version");
  r.command = required<std::string>(j, "command");
  r.config = required<json>(j, "config");
  r.results = required<json>(j, "results");
  return r;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += fmt::format("{},{},{},{},{:.10f}\n", row.params.k, row.params.f,
                       row.params.r, row.params.q, row.p_detect);
  }
  return out;
}

std::string simulate_csv(const std::vector<SimulationReport>& reports) {
  std::string out = kSimulateCsvHeader;
  out += '\n';
  for (const auto& r : reports) {
    out += fmt::format("{},{},{},{},{},{:.10f},{:.10f},{:.10f},{:.10f},{}\n",
                       r.params.k, r.params.f, r.params.r, r.params.q,
                       r.trials, r.exact_detect, r.empirical_detect,
                       r.abs_error, r.three_sigma,
                       r.within_three_sigma() ? "true" : "false");
  }
  return out;
}

CostFixture cost_fixture_from_json(const json& j) {
  if (j.contains("schema_version") &&
      j.at("schema_version").get<std::string>() != kSchemaVersion) {
    throw SchemaError("unsupported cost fixture schema_version");
  }
  CostFixture fx;
  fx.source = j.value("source", std::string{});
  fx.total_tokens = required<std::size_t>(j, "total_tokens");
  for (const auto& row : required<json>(j, "rows")) {
    CostFixtureRow r;
    r.measurement.label = required<std::string>(row, "label");
    r.measurement.decode_tokens = required<std::size_t>(row, "decode_tokens");
    r.measurement.prefill_extra_tokens =
        required<std::size_t>(row, "prefill_extra_tokens");
    r.measurement.seconds = required<double>(row, "seconds");
    r.is_full_generation = row.value("full_generation", false);
    if (row.contains("published_ratio") && !row.at("published_ratio").is_null()) {
      r.published_ratio = row.at("published_ratio").get<double>();
    }
    if (!(r.measurement.seconds > 0)) {
      throw SchemaError("row '" + r.measurement.label +
                        "' must have positive seconds");
    }
    fx.rows.push_back(std::move(r));
  }
  return fx;
}

json to_json(const CostFixture& fx) {
  json rows = json::array();
  for (const auto& r : fx.rows) {
    rows.push_back(
        {{"label", r.measurement.label},
         {"full_generation", r.is_full_generation},
         {"decode_tokens", r.measurement.decode_tokens},
         {"prefill_extra_tokens", r.measurement.prefill_extra_tokens},
         {"seconds", r.measurement.seconds},
         {"published_ratio",
          r.published_ratio ? json(*r.published_ratio) : json(nullptr)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"source", fx.source},
          {"total_tokens", fx.total_tokens},
          {"rows", rows}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace averify
