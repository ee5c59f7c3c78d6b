#include "averify/bench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "averify/error.hpp"

namespace averify {

void CostModel::validate() const {
  if (fixed_overhead_s < 0 || decode_rate_s < 0 || prefill_rate_s < 0) {
    throw InvalidArgument("cost model coefficients must be non-negative");
  }
}

double estimate(const CostModel& model, const CostLedger& ledger) {
  return model.fixed_overhead_s +
         model.prefill_rate_s * static_cast<double>(ledger.prefill_tokens) +
         model.decode_rate_s * static_cast<double>(ledger.decode_tokens);
}

double FitResult::max_abs_relative_residual() const {
  double worst = 0.0;
  for (double r : relative_residuals) worst = std::max(worst, std::abs(r));
  return worst;
}

namespace {

constexpr double kRankThreshold = 1e-10;

Eigen::MatrixXd design(const std::vector<MeasurementRow>& rows,
                       bool with_prefill) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, with_prefill ? 3 : 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(row.decode_tokens);
    if (with_prefill) x(i, 2) = static_cast<double>(row.prefill_extra_tokens);
  }
  return x;
}

}  // namespace

FitResult fit(const std::vector<MeasurementRow>& rows, bool include_prefill) {
  const std::size_t params = include_prefill ? 3 : 2;
  if (rows.size() < params) {
    throw Underdetermined("need at least " + std::to_string(params) +
                          " rows to fit " + std::to_string(params) +
                          " coefficients, got " + std::to_string(rows.size()));
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].seconds > 0)) {
      throw InvalidArgument("measurement '" + rows[i].label +
                            "' must have positive seconds");
    }
    y(static_cast<Eigen::Index>(i)) = rows[i].seconds;
  }

  FitResult result;
  bool with_prefill = include_prefill;
  Eigen::MatrixXd x = design(rows, with_prefill);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(kRankThreshold);
  if (with_prefill && qr.rank() < 3) {
    result.degenerate = true;
    result.degeneracy_note =
        "prefill_extra_tokens is collinear with (1, decode_tokens); prefill "
        "column dropped";
    with_prefill = false;
    x = design(rows, false);
    qr.compute(x);
  }
  result.rank = static_cast<std::size_t>(qr.rank());
  if (qr.rank() < x.cols()) {
    throw Underdetermined("design matrix has rank " +
                          std::to_string(qr.rank()) + " for " +
                          std::to_string(x.cols()) + " coefficients");
  }

  const Eigen::VectorXd beta = qr.solve(y);
  result.prefill_fitted = with_prefill;
  result.model.fixed_overhead_s = beta(0);
  result.model.decode_rate_s = beta(1);
  result.model.prefill_rate_s = with_prefill ? beta(2) : 0.0;

  const Eigen::VectorXd pred = x * beta;
  const double mean = y.mean();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    result.predicted.push_back(pred(i));
    result.relative_residuals.push_back((pred(i) - y(i)) / y(i));
    ss_res += (pred(i) - y(i)) * (pred(i) - y(i));
    ss_tot += (y(i) - mean) * (y(i) - mean);
  }
  result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return result;
}

double effort_ratio(double full_cost, double verify_cost) {
  if (!(verify_cost > 0.0)) {
    throw InvalidArgument("verification cost must be positive");
  }
  return full_cost / verify_cost;
}

}  // namespace averify
