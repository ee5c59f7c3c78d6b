#include "averify/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "averify/error.hpp"
#include "averify/rng.hpp"

namespace averify {

namespace {

constexpr std::uint64_t kValidatorTag = 0x76616c6964ULL;  // "valid"
constexpr std::uint64_t kTamperTag = 0x74616d70ULL;       // "tamp"

}  // namespace

const char* to_string(SimMode mode) {
  return mode == SimMode::oracle ? "oracle" : "full";
}

SimMode sim_mode_from_string(const std::string& text) {
  if (text == "oracle") return SimMode::oracle;
  if (text == "full") return SimMode::full;
  throw InvalidArgument("unknown simulation mode '" + text + "'");
}

ValidatorAssignment draw_assignment(std::uint32_t k, std::uint32_t r,
                                    std::uint32_t validator_id,
                                    std::uint64_t master_seed,
                                    std::uint64_t trial_id) {
  if (r < 1 || r > k) {
    throw InvalidArgument("need 1 <= r <= k, got r=" + std::to_string(r) +
                          ", k=" + std::to_string(k));
  }
  const auto key =
      derive_key({master_seed, kValidatorTag, trial_id, validator_id});
  CounterStream stream(key);
  return {validator_id, sample_without_replacement(k, r, stream), key};
}

std::vector<std::size_t> trial_tamper_indices(std::uint32_t k, std::uint32_t f,
                                              std::uint64_t master_seed,
                                              std::uint64_t trial_id) {
  if (f == 0) return {};
  return sample_tamper_indices(
      k, f, derive_key({master_seed, kTamperTag, trial_id}));
}

namespace {

bool intersects(const std::vector<std::size_t>& chosen,
                const std::vector<std::size_t>& tampered) {
  // Both sorted.
  auto a = chosen.begin();
  auto b = tampered.begin();
  while (a != chosen.end() && b != tampered.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

// Shared trial body. `claim` is only read in full mode.
TrialOutcome trial_body(const ClaimedOutput* claim,
                        const std::vector<std::size_t>& tampered,
                        const AuditParams& params, std::uint64_t master_seed,
                        std::uint64_t trial_id, SimMode mode) {
  TrialOutcome out;
  out.trial_id = trial_id;
  out.per_validator_outcomes.reserve(params.q);
  for (std::uint32_t v = 0; v < params.q; ++v) {
    ValidatorResult result;
    result.assignment =
        draw_assignment(params.k, params.r, v, master_seed, trial_id);
    std::optional<BroadcastEvent> first_hit;
    if (mode == SimMode::oracle) {
      for (auto seg : result.assignment.chosen_segments) {
        if (std::binary_search(tampered.begin(), tampered.end(), seg)) {
          first_hit = BroadcastEvent{v, seg, std::nullopt};
          break;
        }
      }
    } else {
      for (auto seg : result.assignment.chosen_segments) {
        auto outcome = verify_segment(claim->claimed_config, *claim, seg);
        out.total_cost += outcome.cost;
        if (!outcome.matched() && !first_hit) {
          first_hit = BroadcastEvent{v, seg, outcome.first_mismatch};
        }
        result.outcomes.push_back(std::move(outcome));
      }
    }
    result.detected = first_hit.has_value();
    if (result.detected) {
      out.detecting_validators.push_back(v);
      if (!out.broadcast) out.broadcast = first_hit;
    }
    out.per_validator_outcomes.push_back(std::move(result));
  }
  out.detected = !out.detecting_validators.empty();
  out.rejected = out.detected;
  return out;
}

// Oracle-mode trial without materializing per-validator records.
bool oracle_detects(const std::vector<std::size_t>& tampered,
                    const AuditParams& params, std::uint64_t master_seed,
                    std::uint64_t trial_id) {
  if (tampered.empty()) return false;
  for (std::uint32_t v = 0; v < params.q; ++v) {
    const auto a = draw_assignment(params.k, params.r, v, master_seed, trial_id);
    if (intersects(a.chosen_segments, tampered)) return true;
  }
  return false;
}

void check_claim_matches(const ClaimedOutput& claim,
                         const AuditParams& params) {
  if (claim.segmentation.k() != params.k) {
    throw ConfigurationError(
        "claim has " + std::to_string(claim.segmentation.k()) +
        " segments but params.k is " + std::to_string(params.k));
  }
  const std::size_t f =
      claim.ground_truth_tamper ? claim.ground_truth_tamper->f() : 0;
  if (f != params.f) {
    throw ConfigurationError("claim has " + std::to_string(f) +
                             " tampered segments but params.f is " +
                             std::to_string(params.f));
  }
}

void validate_params(const AuditParams& params) {
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigurationError(e.what());
  }
}

}  // namespace

TrialOutcome run_trial(const ClaimedOutput& claim, const AuditParams& params,
                       std::uint64_t master_seed, std::uint64_t trial_id,
                       SimMode mode) {
  validate_params(params);
  check_claim_matches(claim, params);
  std::vector<std::size_t> tampered;
  if (claim.ground_truth_tamper) {
    tampered = claim.ground_truth_tamper->tampered_indices;
  }
  return trial_body(&claim, tampered, params, master_seed, trial_id, mode);
}

ClaimTemplate make_claim_template(const ModelConfig& config,
                                  const TokenSequence& prompt, std::size_t m,
                                  std::size_t k) {
  ClaimTemplate t;
  t.honest = make_honest_claim(config, prompt, m, k);
  ModelConfig alt = config;
  alt.model_id += "/alt";
  t.source = AltModelSource{alt};
  return t;
}

namespace {

struct TrialResult {
  bool detected = false;
  CostLedger cost;
  std::optional<TrialOutcome> outcome;
};

TrialResult simulate_trial(const ClaimTemplate& claim_template,
                           const AuditParams& params,
                           const ExperimentOptions& options,
                           std::uint64_t trial_id) {
  const auto tampered = trial_tamper_indices(params.k, params.f,
                                             options.master_seed, trial_id);
  TrialResult result;
  if (options.mode == SimMode::oracle && !options.keep_trials) {
    result.detected =
        oracle_detects(tampered, params, options.master_seed, trial_id);
    return result;
  }
  TrialOutcome outcome;
  if (options.mode == SimMode::oracle) {
    outcome = trial_body(nullptr, tampered, params, options.master_seed,
                         trial_id, SimMode::oracle);
  } else if (tampered.empty()) {
    outcome = run_trial(claim_template.honest, params, options.master_seed,
                        trial_id, SimMode::full);
  } else {
    TamperPlan plan;
    plan.strategy = tampered.size() == params.k
                        ? TamperStrategy::full_replacement
                        : TamperStrategy::segment_injection;
    plan.tampered_indices = tampered;
    plan.replacement_source = claim_template.source;
    const auto claim = apply_tamper(claim_template.honest, plan);
    outcome = run_trial(claim, params, options.master_seed, trial_id,
                        SimMode::full);
  }
  result.detected = outcome.detected;
  result.cost = outcome.total_cost;
  if (options.keep_trials) result.outcome = std::move(outcome);
  return result;
}

}  // namespace

SimulationReport run_experiment(const ClaimTemplate& claim_template,
                                const AuditParams& params,
                                const ExperimentOptions& options) {
  validate_params(params);
  if (options.trials == 0) {
    throw ConfigurationError("an experiment needs at least one trial");
  }
  if (claim_template.honest.segmentation.k() != params.k) {
    throw ConfigurationError(
        "claim template has " +
        std::to_string(claim_template.honest.segmentation.k()) +
        " segments but params.k is " + std::to_string(params.k));
  }
  if (claim_template.honest.ground_truth_tamper) {
    throw ConfigurationError("claim template must be honest");
  }

  const std::size_t n = options.trials;
  std::vector<TrialResult> results(n);
  const unsigned workers = std::max(
      1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t t = 0; t < n; ++t) {
      results[t] = simulate_trial(claim_template, params, options, t);
    }
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < n; t += workers) {
            results[t] = simulate_trial(claim_template, params, options, t);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SimulationReport report;
  report.params = params;
  report.mode = options.mode;
  report.trials = n;
  report.master_seed = options.master_seed;
  for (auto& r : results) {
    if (r.detected) ++report.detected_count;
    report.total_cost += r.cost;
    if (r.outcome) report.trial_outcomes.push_back(std::move(*r.outcome));
  }
  report.empirical_detect =
      static_cast<double>(report.detected_count) / static_cast<double>(n);
  report.exact_detect = p_detect(params);
  report.abs_error = std::abs(report.empirical_detect - report.exact_detect);
  const double p = report.exact_detect;
  report.three_sigma = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return report;
}

}  // namespace averify
