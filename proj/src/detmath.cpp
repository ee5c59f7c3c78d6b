#include "averify/detmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "averify/error.hpp"

namespace averify {

void AuditParams::validate() const {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (r < 1 || r > k) {
    throw InvalidArgument("need 1 <= r <= k, got r=" + std::to_string(r) +
                          ", k=" + std::to_string(k));
  }
  if (f > k) {
    throw InvalidArgument("need f <= k, got f=" + std::to_string(f) +
                          ", k=" + std::to_string(k));
  }
  if (q < 1) throw InvalidArgument("q must be at least 1");
}

namespace {

void check_kfr(std::uint32_t k, std::uint32_t f, std::uint32_t r) {
  AuditParams{k, f, r, 1}.validate();
}

}  // namespace

double p_single_fail(std::uint32_t k, std::uint32_t f, std::uint32_t r) {
  check_kfr(k, f, r);
  if (r > k - f) return 0.0;
  double p = 1.0;
  for (std::uint32_t i = 0; i < r; ++i) {
    p *= static_cast<double>(k - f - i) / static_cast<double>(k - i);
  }
  return std::clamp(p, 0.0, 1.0);
}

double p_detect(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                std::uint32_t q) {
  AuditParams{k, f, r, q}.validate();
  const double miss = p_single_fail(k, f, r);
  return std::clamp(1.0 - std::pow(miss, static_cast<double>(q)), 0.0, 1.0);
}

double p_detect(const AuditParams& params) {
  return p_detect(params.k, params.f, params.r, params.q);
}

Rational p_single_fail_exact(std::uint32_t k, std::uint32_t f,
                             std::uint32_t r) {
  check_kfr(k, f, r);
  if (r > k - f) return Rational(0);
  Rational p(1);
  for (std::uint32_t i = 0; i < r; ++i) {
    p *= Rational(k - f - i, k - i);
  }
  return p;
}

Rational p_detect_exact(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                        std::uint32_t q) {
  AuditParams{k, f, r, q}.validate();
  const Rational miss = p_single_fail_exact(k, f, r);
  Rational all_miss(1);
  for (std::uint32_t i = 0; i < q; ++i) all_miss *= miss;
  return Rational(1) - all_miss;
}

std::uint32_t min_validators(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                             double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw InvalidArgument("target must lie strictly between 0 and 1");
  }
  check_kfr(k, f, r);
  const double miss = p_single_fail(k, f, r);
  if (f == 0 || miss >= 1.0) {
    throw UnreachableTarget("no number of validators reaches the target when "
                            "nothing can be detected");
  }
  if (miss <= 0.0) return 1;
  auto q = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil(std::log1p(-target) / std::log(miss))));
  // The closed form can be off by one in floating point; settle it directly.
  while (q > 1 && p_detect(k, f, r, q - 1) >= target) --q;
  while (p_detect(k, f, r, q) < target) ++q;
  return q;
}

namespace {

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepGrid& grid) {
  std::vector<SweepRow> rows;
  if (grid.empty()) return rows;
  const auto ks = sorted_unique(grid.k);
  const auto fs = sorted_unique(grid.f);
  const auto rs = sorted_unique(grid.r);
  const auto qs = sorted_unique(grid.q);
  rows.reserve(ks.size() * fs.size() * rs.size() * qs.size());
  for (auto k : ks) {
    for (auto f : fs) {
      for (auto r : rs) {
        for (auto q : qs) {
          AuditParams params{k, f, r, q};
          rows.push_back({params, p_detect(params)});
        }
      }
    }
  }
  return rows;
}

}  // namespace averify
