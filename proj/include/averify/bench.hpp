#pragma once

// Linear cost model for generation and verification, fitted to measured
// timings, and the asymmetric effort ratio (full generation time divided by
// verification time).

#include <cstddef>
#include <string>
#include <vector>

#include "averify/verify.hpp"

namespace averify {

struct CostModel {
  double fixed_overhead_s = 0.0;
  double decode_rate_s = 0.0;   // per decoded token
  double prefill_rate_s = 0.0;  // per prefill token

  void validate() const;
};

struct MeasurementRow {
  std::string label;
  std::size_t prefill_extra_tokens = 0;
  std::size_t decode_tokens = 0;
  double seconds = 0.0;
};

double estimate(const CostModel& model, const CostLedger& ledger);

struct FitResult {
  CostModel model;
  bool prefill_fitted = false;
  // The prefill column was requested but is a linear combination of the
  // others, so it was dropped.
  bool degenerate = false;
  std::string degeneracy_note;
  std::size_t rank = 0;
  double r_squared = 0.0;
  std::vector<double> predicted;
  std::vector<double> relative_residuals;  // (predicted - observed) / observed

  double max_abs_relative_residual() const;
};

// Ordinary least squares of seconds on (1, decode[, prefill_extra]).
// Throws Underdetermined when there are fewer rows than parameters or the
// remaining design is still rank deficient.
FitResult fit(const std::vector<MeasurementRow>& rows, bool include_prefill);

double effort_ratio(double full_cost, double verify_cost);

}  // namespace averify
