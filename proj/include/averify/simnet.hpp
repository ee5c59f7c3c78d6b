#pragma once

// Monte Carlo simulation of distributed probabilistic verification: one
// generator, q validators each auditing r random segments, a broadcast on the
// first mismatch and consensus rejection of the claim.
//
// Randomness is counter based. Validator v in trial t of an experiment seeded
// with s draws from a stream keyed on (s, t, v) and tamper placement for trial
// t from a stream keyed on (s, t), so a report is a pure function of its
// inputs whatever the thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "averify/detmath.hpp"
#include "averify/seqlab.hpp"
#include "averify/verify.hpp"

namespace averify {

enum class SimMode { oracle, full };

const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& text);

struct ValidatorAssignment {
  std::uint32_t validator_id = 0;
  std::vector<std::size_t> chosen_segments;  // sorted, r distinct indices
  std::uint64_t rng_seed = 0;                // stream key

  friend bool operator==(const ValidatorAssignment&,
                         const ValidatorAssignment&) = default;
};

ValidatorAssignment draw_assignment(std::uint32_t k, std::uint32_t r,
                                    std::uint32_t validator_id,
                                    std::uint64_t master_seed,
                                    std::uint64_t trial_id);

struct ValidatorResult {
  ValidatorAssignment assignment;
  bool detected = false;
  // One entry per chosen segment in full mode; empty in oracle mode.
  std::vector<VerificationOutcome> outcomes;
};

// First validator to report a mismatch announces it to the others.
struct BroadcastEvent {
  std::uint32_t validator_id = 0;
  std::size_t segment_index = 0;
  std::optional<std::size_t> first_mismatch;  // full mode only
};

struct TrialOutcome {
  std::uint64_t trial_id = 0;
  bool detected = false;
  bool rejected = false;
  std::vector<std::uint32_t> detecting_validators;
  std::vector<ValidatorResult> per_validator_outcomes;
  std::optional<BroadcastEvent> broadcast;
  CostLedger total_cost;
};

// Runs one trial against an already tampered (or honest) claim. Requires
// claim.segmentation.k() == params.k and the ground-truth tamper count to
// equal params.f; throws ConfigurationError otherwise.
TrialOutcome run_trial(const ClaimedOutput& claim, const AuditParams& params,
                       std::uint64_t master_seed, std::uint64_t trial_id,
                       SimMode mode);

// The honest claim an experiment tampers afresh in every trial, plus where
// replacement tokens come from.
struct ClaimTemplate {
  ClaimedOutput honest;
  ReplacementSource source;
};

// Alternative model = claimed model with a different seed (cost evasion).
ClaimTemplate make_claim_template(const ModelConfig& config,
                                  const TokenSequence& prompt, std::size_t m,
                                  std::size_t k);

struct ExperimentOptions {
  std::size_t trials = 10000;
  std::uint64_t master_seed = 0;
  SimMode mode = SimMode::oracle;
  unsigned threads = 1;
  bool keep_trials = false;
};

struct SimulationReport {
  AuditParams params;
  SimMode mode = SimMode::oracle;
  std::size_t trials = 0;
  std::size_t detected_count = 0;
  double empirical_detect = 0.0;
  double exact_detect = 0.0;
  double abs_error = 0.0;
  double three_sigma = 0.0;
  std::uint64_t master_seed = 0;
  CostLedger total_cost;
  std::vector<TrialOutcome> trial_outcomes;  // only with keep_trials

  bool within_three_sigma() const { return abs_error <= three_sigma; }
};

// Tamper indices for a trial: fresh uniform f-subset per trial.
std::vector<std::size_t> trial_tamper_indices(std::uint32_t k, std::uint32_t f,
                                              std::uint64_t master_seed,
                                              std::uint64_t trial_id);

SimulationReport run_experiment(const ClaimTemplate& claim_template,
                                const AuditParams& params,
                                const ExperimentOptions& options);

}  // namespace averify
