#include "averify/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <ostream>

#include "averify/bench.hpp"
#include "averify/detmath.hpp"
#include "averify/error.hpp"
#include "averify/records.hpp"
#include "averify/rng.hpp"
#include "averify/simnet.hpp"
#include "averify/svg.hpp"
#include "averify/verify.hpp"

#ifndef AVERIFY_DATA_DIR
#define AVERIFY_DATA_DIR "data"
#endif

namespace averify {

std::vector<std::uint32_t> parse_u32_list(const std::string& text) {
  std::vector<std::uint32_t> values;
  auto parse_one = [&](const std::string& s) -> std::uint32_t {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-' || v > UINT32_MAX) {
      throw ConfigurationError("'" + s + "' is not a non-negative integer");
    }
    return static_cast<std::uint32_t>(v);
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.empty()) throw ConfigurationError("empty item in '" + text + "'");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_one(item));
    } else {
      const auto lo = parse_one(item.substr(0, dots));
      const auto hi = parse_one(item.substr(dots + 2));
      if (lo > hi) throw ConfigurationError("empty range '" + item + "'");
      for (auto v = lo; v <= hi; ++v) values.push_back(v);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Settings shared by all subcommands.

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--seed", flags.seed, "master seed (u64)");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--format", flags.format, "stdout format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--svg", flags.svg, "also write an SVG chart");
}

json load_config(const CommonFlags& flags) {
  if (flags.config_path.empty()) return json::object();
  auto j = read_json_file(flags.config_path);
  if (!j.is_object()) {
    throw ConfigurationError("config file must hold a JSON object");
  }
  return j;
}

std::vector<std::uint32_t> list_from_json(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return parse_u32_list(v.get<std::string>());
  if (v.is_number_unsigned()) return {v.get<std::uint32_t>()};
  if (v.is_array()) return v.get<std::vector<std::uint32_t>>();
  throw ConfigurationError(std::string("'") + key +
                           "' must be a list, a number or a range string");
}

template <typename T>
void take(const json& cfg, const char* key, T& target) {
  if (!cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config field '") + key +
                             "': " + e.what());
  }
}

struct GridSettings {
  std::vector<std::uint32_t> k{20};
  std::vector<std::uint32_t> f{2};
  std::vector<std::uint32_t> r{1, 2, 3, 4};
  std::vector<std::uint32_t> q = parse_u32_list("1..20");

  std::string k_flag, f_flag, r_flag, q_flag;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--k", k_flag, "segment counts, e.g. 20 or 10,20");
    cmd->add_option("--f", f_flag, "tampered segment counts");
    cmd->add_option("--r", r_flag, "segments per validator, e.g. 1..4");
    cmd->add_option("--q", q_flag, "validator counts, e.g. 1..20");
  }

  void resolve(const json& cfg) {
    for (auto [key, target] :
         {std::pair{"k", &k}, {"f", &f}, {"r", &r}, {"q", &q}}) {
      if (cfg.contains(key)) *target = list_from_json(cfg, key);
    }
    if (!k_flag.empty()) k = parse_u32_list(k_flag);
    if (!f_flag.empty()) f = parse_u32_list(f_flag);
    if (!r_flag.empty()) r = parse_u32_list(r_flag);
    if (!q_flag.empty()) q = parse_u32_list(q_flag);
  }

  SweepGrid grid() const { return {k, f, r, q}; }

  json to_json() const {
    return {{"k", k}, {"f", f}, {"r", r}, {"q", q}};
  }
};

// Grid cells in lexicographic order; any invalid cell is a usage error.
std::vector<AuditParams> grid_cells(const SweepGrid& grid) {
  std::vector<AuditParams> cells;
  try {
    for (const auto& row : sweep(grid)) cells.push_back(row.params);
  } catch (const InvalidArgument& e) {
    throw ConfigurationError(std::string("invalid grid: ") + e.what());
  }
  if (cells.empty()) throw ConfigurationError("grid is empty");
  return cells;
}

ModelConfig default_model() { return {"ref", 42, 256, 4096}; }

TokenSequence prompt_from(const std::vector<TokenId>& tokens) {
  return {tokens, SequenceRole::prompt};
}

void prepare_out(const CommonFlags& flags) {
  if (flags.out_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(flags.out_dir, ec);
  if (ec) {
    throw ConfigurationError("cannot create output directory '" +
                             flags.out_dir + "': " + ec.message());
  }
}

void write_out(const CommonFlags& flags, const std::string& name,
               const std::string& text) {
  if (flags.out_dir.empty()) return;
  write_text_file((fs::path(flags.out_dir) / name).string(), text);
}

RunRecord make_record(const std::string& command, json config, json results) {
  RunRecord rec;
  rec.timestamp = utc_timestamp();
  rec.command = command;
  rec.config = std::move(config);
  rec.results = std::move(results);
  return rec;
}

void emit_record(const CommonFlags& flags, const std::string& stem,
                 const RunRecord& rec) {
  write_out(flags, stem + ".json", to_json(rec).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// sweep-detect

struct SweepDetectCmd {
  CommonFlags common;
  GridSettings grid;

  int run(std::ostream& out) {
    const auto cfg = load_config(common);
    grid.resolve(cfg);
    grid_cells(grid.grid());
    prepare_out(common);
    const auto rows = sweep(grid.grid());
    const auto csv = sweep_csv(rows);

    json table = json::array();
    for (const auto& row : rows) {
      table.push_back({{"k", row.params.k},
                       {"f", row.params.f},
                       {"r", row.params.r},
                       {"q", row.params.q},
                       {"p_detect", row.p_detect}});
    }
    const auto rec = make_record("sweep-detect", {{"grid", grid.to_json()}},
                                 {{"rows", table}});
    write_out(common, "sweep_detect.csv", csv);
    emit_record(common, "sweep_detect", rec);
    if (common.svg) write_out(common, "sweep_detect.svg", chart(rows));
    if (common.format == "json") {
      out << to_json(rec).dump(2) << "\n";
    } else {
      out << csv;
    }
    return kExitOk;
  }

  static std::string chart(const std::vector<SweepRow>& rows) {
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>,
             ChartSeries>
        lines;
    for (const auto& row : rows) {
      auto& s = lines[{row.params.k, row.params.f, row.params.r}];
      s.label = fmt::format("k={} f={} r={}", row.params.k, row.params.f,
                            row.params.r);
      s.points.emplace_back(row.params.q, row.p_detect);
    }
    std::vector<ChartSeries> series;
    for (auto& [key, s] : lines) series.push_back(std::move(s));
    return line_chart_svg({"Exact detection probability", "validators q",
                           "P(detect)"},
                          series);
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCmd {
  CommonFlags common;
  GridSettings grid;
  std::optional<std::size_t> trials_flag;
  std::optional<std::string> mode_flag;
  std::optional<std::size_t> m_flag;
  std::optional<unsigned> threads_flag;
  std::optional<std::size_t> allowed_flag;
  bool keep_trials = false;

  void add_flags(CLI::App* cmd) {
    add_common(cmd, common);
    grid.add_flags(cmd);
    cmd->add_option("--trials", trials_flag, "trials per grid point");
    cmd->add_option("--mode", mode_flag, "oracle or full")
        ->check(CLI::IsMember({"oracle", "full"}));
    cmd->add_option("--m", m_flag, "output length in tokens (full mode)");
    cmd->add_option("--threads", threads_flag, "worker threads");
    cmd->add_option("--allowed-outside", allowed_flag,
                    "grid points allowed outside 3 sigma");
    cmd->add_flag("--keep-trials", keep_trials,
                  "store per-trial outcomes in the run record");
  }

  int run(std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(common);
    grid.resolve(cfg);

    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::string mode_text = "oracle";
    std::size_t m = 400;
    unsigned threads = 1;
    std::size_t allowed = 2;
    ModelConfig model = default_model();
    std::vector<TokenId> prompt{1, 2, 3};
    take(cfg, "trials", trials);
    take(cfg, "seed", seed);
    take(cfg, "mode", mode_text);
    take(cfg, "m", m);
    take(cfg, "threads", threads);
    take(cfg, "allowed_outside", allowed);
    take(cfg, "keep_trials", keep_trials);
    take(cfg, "prompt", prompt);
    if (cfg.contains("model")) model = model_config_from_json(cfg.at("model"));
    if (trials_flag) trials = *trials_flag;
    if (common.seed) seed = *common.seed;
    if (mode_flag) mode_text = *mode_flag;
    if (m_flag) m = *m_flag;
    if (threads_flag) threads = *threads_flag;
    if (allowed_flag) allowed = *allowed_flag;
    const SimMode mode = sim_mode_from_string(mode_text);
    if (trials == 0) throw ConfigurationError("trials must be at least 1");

    const auto cells = grid_cells(grid.grid());
    prepare_out(common);

    // One claim template per distinct k.
    std::map<std::uint32_t, ClaimTemplate> templates;
    for (const auto& p : cells) {
      if (templates.contains(p.k)) continue;
      if (p.k > m) {
        throw ConfigurationError("k=" + std::to_string(p.k) +
                                 " exceeds output length m=" +
                                 std::to_string(m));
      }
      ModelConfig mc = model;
      mc.max_output = std::max<std::uint32_t>(mc.max_output,
                                              static_cast<std::uint32_t>(m));
      templates.emplace(p.k,
                        make_claim_template(mc, prompt_from(prompt), m, p.k));
    }

    std::vector<SimulationReport> reports;
    std::size_t outside = 0;
    for (const auto& p : cells) {
      ExperimentOptions opt;
      opt.trials = trials;
      opt.master_seed = derive_key({seed, p.k, p.f, p.r, p.q});
      opt.mode = mode;
      opt.threads = threads;
      opt.keep_trials = keep_trials;
      reports.push_back(run_experiment(templates.at(p.k), p, opt));
      if (!reports.back().within_three_sigma()) ++outside;
    }

    const auto csv = simulate_csv(reports);
    json payload = json::array();
    for (const auto& r : reports) payload.push_back(to_json(r));
    json config = {{"grid", grid.to_json()},
                   {"trials", trials},
                   {"seed", seed},
                   {"mode", mode_text},
                   {"m", m},
                   {"threads", threads},
                   {"allowed_outside", allowed},
                   {"model", to_json(model)},
                   {"prompt", prompt}};
    const bool passed = outside <= allowed;
    const auto rec = make_record(
        "simulate", config,
        {{"reports", payload},
         {"points_outside_3sigma", outside},
         {"acceptance_passed", passed}});
    write_out(common, "simulate.csv", csv);
    emit_record(common, "simulate", rec);
    if (common.svg) write_out(common, "simulate.svg", chart(reports));
    if (common.format == "json") {
      out << to_json(rec).dump(2) << "\n";
    } else {
      out << csv;
    }
    if (!passed) {
      err << outside << " grid points fall outside 3 sigma (allowed "
          << allowed << ")\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  }

  static std::string chart(const std::vector<SimulationReport>& reports) {
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>,
             std::pair<ChartSeries, ChartSeries>>
        lines;
    for (const auto& r : reports) {
      auto& [exact, empirical] = lines[{r.params.k, r.params.f, r.params.r}];
      exact.label = fmt::format("exact r={}", r.params.r);
      empirical.label = fmt::format("empirical r={}", r.params.r);
      empirical.markers_only = true;
      exact.points.emplace_back(r.params.q, r.exact_detect);
      empirical.points.emplace_back(r.params.q, r.empirical_detect);
    }
    std::vector<ChartSeries> series;
    for (auto& [key, pair] : lines) {
      series.push_back(std::move(pair.first));
      series.push_back(std::move(pair.second));
    }
    return line_chart_svg(
        {"Detection probability: exact vs simulated", "validators q",
         "P(detect)"},
        series);
  }
};

// ---------------------------------------------------------------------------
// replicate

struct ReplicateCmd {
  CommonFlags common;
  std::optional<std::size_t> m_flag;
  std::optional<std::uint32_t> k_flag;
  std::optional<std::size_t> spans_flag;
  std::optional<std::size_t> tamper_flag;
  std::optional<double> flip_flag;
  std::optional<std::uint64_t> drift_seed_flag;

  void add_flags(CLI::App* cmd) {
    add_common(cmd, common);
    cmd->add_option("--m", m_flag, "output length in tokens");
    cmd->add_option("--k", k_flag, "segment count");
    cmd->add_option("--spans", spans_flag, "number of random spans to verify");
    cmd->add_option("--tamper-segment", tamper_flag,
                    "segment index the adversary replaces");
    cmd->add_option("--drift", flip_flag,
                    "flip probability of a drifting validator");
    cmd->add_option("--drift-seed", drift_seed_flag, "drift seed");
  }

  int run(std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(common);
    ModelConfig model = default_model();
    std::vector<TokenId> prompt{1, 2, 3};
    std::size_t m = 792;
    std::uint32_t k = 20;
    std::size_t span_count = 5;
    std::size_t tamper_segment = 3;
    std::uint64_t seed = 1;
    std::optional<DriftSpec> drift;
    if (cfg.contains("model")) model = model_config_from_json(cfg.at("model"));
    take(cfg, "prompt", prompt);
    take(cfg, "m", m);
    take(cfg, "k", k);
    take(cfg, "spans", span_count);
    take(cfg, "tamper_segment", tamper_segment);
    take(cfg, "seed", seed);
    if (cfg.contains("drift")) drift = drift_spec_from_json(cfg.at("drift"));
    if (m_flag) m = *m_flag;
    if (k_flag) k = *k_flag;
    if (spans_flag) span_count = *spans_flag;
    if (tamper_flag) tamper_segment = *tamper_flag;
    if (common.seed) seed = *common.seed;
    if (flip_flag || drift_seed_flag) {
      DriftSpec d = drift.value_or(DriftSpec{});
      if (flip_flag) d.flip_probability = *flip_flag;
      if (drift_seed_flag) d.drift_seed = *drift_seed_flag;
      drift = d;
    }

    ClaimedOutput honest;
    TamperPlan plan;
    ClaimedOutput tampered;
    try {
      model.validate();
      if (drift) drift->validate();
      if (m > model.max_output) model.max_output = static_cast<std::uint32_t>(m);
      honest = make_honest_claim(model, prompt_from(prompt), m, k);
      if (tamper_segment >= k) {
        throw InvalidArgument("tamper segment " +
                              std::to_string(tamper_segment) +
                              " out of range for k=" + std::to_string(k));
      }
      ModelConfig alt = model;
      alt.model_id += "/alt";
      plan = {TamperStrategy::segment_injection, {tamper_segment},
              AltModelSource{alt}};
      tampered = apply_tamper(honest, plan);
    } catch (const Error& e) {
      throw ConfigurationError(e.what());
    }
    prepare_out(common);

    // Random spans plus the tampered segment's own span.
    CounterStream stream(derive_key({seed, 0x7370616eULL}));
    std::vector<Span> spans;
    for (std::size_t i = 0; i < span_count; ++i) {
      const auto start = static_cast<std::size_t>(stream.uniform(m));
      const auto max_len = std::min<std::size_t>(50, m - start);
      const auto len = 1 + static_cast<std::size_t>(stream.uniform(max_len));
      spans.push_back({start, start + len});
    }
    const Span tamper_span = honest.segmentation.at(tamper_segment);

    struct Row {
      std::string claim;
      VerificationOutcome outcome;
      bool expected_mismatch;
    };
    std::vector<Row> rows;
    bool unexpected = false;

    auto check = [&](const std::string& label, const ClaimedOutput& claim,
                     Span span, bool expect_mismatch, bool drifted) {
      auto outcome = drifted ? verify_with_drift(model, *drift, claim, span)
                             : verify_span(model, claim, span);
      if (!drifted && outcome.matched() == expect_mismatch) unexpected = true;
      rows.push_back({label, outcome, expect_mismatch});
    };

    // A span is expected to fail iff it holds a token the claimed model would
    // not emit after the claimed prefix.
    const auto divergent = divergent_positions(tampered);
    for (const auto& span : spans) check("honest", honest, span, false, false);
    for (const auto& span : spans) {
      const bool hit = std::any_of(divergent.begin(), divergent.end(),
                                   [&](auto d) { return span.contains(d); });
      check("tampered", tampered, span, hit, false);
    }
    check("tampered", tampered, tamper_span, true, false);
    if (drift) {
      for (const auto& span : spans) check("drift", honest, span, false, true);
    }

    json outcomes = json::array();
    std::string table = fmt::format("{:<10} {:>13} {:>9} {:>15} {:>8} {:>7}\n",
                                    "claim", "span", "verdict",
                                    "first_mismatch", "prefill", "decode");
    for (const auto& row : rows) {
      const auto& o = row.outcome;
      table += fmt::format(
          "{:<10} {:>13} {:>9} {:>15} {:>8} {:>7}\n", row.claim,
          fmt::format("[{},{})", o.checked_span.start, o.checked_span.end),
          to_string(o.verdict),
          o.first_mismatch ? std::to_string(*o.first_mismatch) : "-",
          o.cost.prefill_tokens, o.cost.decode_tokens);
      json j = to_json(o);
      j["claim"] = row.claim;
      j["expected_mismatch"] = row.expected_mismatch;
      outcomes.push_back(j);
    }

    json config = {{"model", to_json(model)},
                   {"prompt", prompt},
                   {"m", m},
                   {"k", k},
                   {"spans", span_count},
                   {"tamper_segment", tamper_segment},
                   {"seed", seed},
                   {"drift", drift ? to_json(*drift) : json(nullptr)}};
    json results = {{"drift_mode", drift.has_value()},
                    {"outcomes", outcomes},
                    {"tamper_divergent_positions", divergent},
                    {"unexpected_verdicts", unexpected},
                    {"honest_claim", to_json(honest)},
                    {"tampered_claim", to_json(tampered)}};
    const auto rec = make_record("replicate", config, results);
    emit_record(common, "replicate", rec);
    if (common.format == "json") {
      out << to_json(rec).dump(2) << "\n";
    } else {
      out << table;
      if (drift) {
        out << "drift mode: validator flips tokens with probability "
            << drift->flip_probability << "\n";
      }
    }
    if (unexpected) {
      err << "verification produced an unexpected verdict\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// calibrate-cost

struct CalibrateCmd {
  CommonFlags common;
  std::string fixture_flag;
  bool no_prefill_flag = false;

  void add_flags(CLI::App* cmd) {
    add_common(cmd, common);
    cmd->add_option("--fixture", fixture_flag,
                    "timing table (defaults to the shipped cost table)");
    cmd->add_flag("--no-prefill", no_prefill_flag,
                  "skip the all-rows fit with a prefill rate");
  }

  int run(std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(common);
    std::string fixture_path =
        (fs::path(AVERIFY_DATA_DIR) / "cost_table.json").string();
    bool include_prefill = true;
    take(cfg, "fixture", fixture_path);
    take(cfg, "include_prefill", include_prefill);
    if (!fixture_flag.empty()) fixture_path = fixture_flag;
    if (no_prefill_flag) include_prefill = false;

    CostFixture fixture;
    try {
      fixture = cost_fixture_from_json(read_json_file(fixture_path));
    } catch (const SchemaError& e) {
      throw ConfigurationError(e.what());
    }
    prepare_out(common);

    std::vector<MeasurementRow> verification;
    std::vector<MeasurementRow> all;
    std::optional<MeasurementRow> full;
    for (const auto& row : fixture.rows) {
      all.push_back(row.measurement);
      if (row.is_full_generation) {
        full = row.measurement;
      } else {
        verification.push_back(row.measurement);
      }
    }

    // Underdetermined propagates as a usage error.
    const FitResult verify_fit = fit(verification, false);
    std::optional<FitResult> prefill_fit;
    if (include_prefill && all.size() >= 3) prefill_fit = fit(all, true);

    constexpr double kRatioTolerance = 0.01;
    constexpr double kResidualLimit = 0.05;
    bool ratios_ok = true;
    json ratios = json::array();
    std::string table = "label              seconds   ratio  published\n";
    for (const auto& row : fixture.rows) {
      if (row.is_full_generation) continue;
      json entry = {{"label", row.measurement.label},
                    {"seconds", row.measurement.seconds}};
      std::string ratio_text = "-";
      std::string published_text = "-";
      if (full) {
        const double ratio = effort_ratio(full->seconds, row.measurement.seconds);
        entry["ratio"] = ratio;
        ratio_text = fmt::format("{:.2f}", ratio);
        if (row.published_ratio) {
          const bool ok = std::abs(ratio - *row.published_ratio) <= kRatioTolerance;
          ratios_ok = ratios_ok && ok;
          entry["published_ratio"] = *row.published_ratio;
          entry["within_tolerance"] = ok;
          published_text = fmt::format("{:.2f}", *row.published_ratio);
        }
      }
      ratios.push_back(entry);
      table += fmt::format("{:<17} {:>8.2f} {:>7} {:>10}\n",
                           row.measurement.label, row.measurement.seconds,
                           ratio_text, published_text);
    }
    const bool residuals_ok =
        verify_fit.max_abs_relative_residual() < kResidualLimit;
    table += fmt::format(
        "fit: overhead {:.4f} s, decode {:.5f} s/token, R^2 {:.6f}, max "
        "residual {:.2f}%\n",
        verify_fit.model.fixed_overhead_s, verify_fit.model.decode_rate_s,
        verify_fit.r_squared, 100 * verify_fit.max_abs_relative_residual());
    if (prefill_fit && prefill_fit->degenerate) {
      table += "warning: " + prefill_fit->degeneracy_note + "\n";
    }

    json results = {{"verification_fit", to_json(verify_fit)},
                    {"ratios", ratios},
                    {"ratios_within_tolerance", ratios_ok},
                    {"residuals_within_limit", residuals_ok},
                    {"ratio_tolerance", kRatioTolerance},
                    {"residual_limit", kResidualLimit}};
    if (prefill_fit) {
      results["prefill_fit"] = to_json(*prefill_fit);
      results["degeneracy_warning"] =
          prefill_fit->degenerate ? json(prefill_fit->degeneracy_note)
                                  : json(nullptr);
    }
    if (full) {
      results["full_generation_estimate_s"] =
          estimate(verify_fit.model, CostLedger{0, full->decode_tokens});
    }
    const auto rec = make_record(
        "calibrate-cost",
        {{"fixture", to_json(fixture)}, {"include_prefill", include_prefill}},
        results);
    emit_record(common, "calibrate_cost", rec);
    if (common.format == "json") {
      out << to_json(rec).dump(2) << "\n";
    } else {
      out << table;
    }
    if (!ratios_ok || !residuals_ok) {
      err << "cost table reproduction check failed\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Asymmetric verification toolkit: targeted validation, "
               "detection math and simulation"};
  app.name("averify");
  app.require_subcommand(1);

  SweepDetectCmd sweep_cmd;
  auto* sweep_app =
      app.add_subcommand("sweep-detect", "exact detection probability grid");
  add_common(sweep_app, sweep_cmd.common);
  sweep_cmd.grid.add_flags(sweep_app);

  SimulateCmd sim_cmd;
  auto* sim_app =
      app.add_subcommand("simulate", "Monte Carlo detection experiments");
  sim_cmd.add_flags(sim_app);

  ReplicateCmd rep_cmd;
  auto* rep_app = app.add_subcommand(
      "replicate", "targeted validation of honest and tampered outputs");
  rep_cmd.add_flags(rep_app);

  CalibrateCmd cal_cmd;
  auto* cal_app = app.add_subcommand(
      "calibrate-cost", "fit the linear cost model and effort ratios");
  cal_cmd.add_flags(cal_app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sweep_app->parsed()) return sweep_cmd.run(out);
    if (sim_app->parsed()) return sim_cmd.run(out, err);
    if (rep_app->parsed()) return rep_cmd.run(out, err);
    if (cal_app->parsed()) return cal_cmd.run(out, err);
  } catch (const Error& e) {
    // ConfigurationError, Underdetermined and invalid parameters alike.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: malformed config: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace averify
