#pragma once

// Detection probabilities for segment sampling without replacement.
//
// A validator that checks r of k segments, f of which are tampered, misses
// every tampered one with probability C(k-f, r) / C(k, r). With q validators
// choosing independently the tampering is caught with probability
// 1 - (C(k-f, r) / C(k, r))^q.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

namespace averify {

using Rational = boost::multiprecision::cpp_rational;

struct AuditParams {
  std::uint32_t k = 20;  // segments
  std::uint32_t f = 2;   // tampered segments
  std::uint32_t r = 1;   // segments checked per validator
  std::uint32_t q = 1;   // validators

  // Throws InvalidArgument unless 1 <= r <= k, f <= k, q >= 1.
  void validate() const;

  friend bool operator==(const AuditParams&, const AuditParams&) = default;
};

// Evaluated as prod_{i<r} (k-f-i)/(k-i), which never forms a factorial.
double p_single_fail(std::uint32_t k, std::uint32_t f, std::uint32_t r);
double p_detect(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                std::uint32_t q);
double p_detect(const AuditParams& params);

// Exact rational counterparts.
Rational p_single_fail_exact(std::uint32_t k, std::uint32_t f, std::uint32_t r);
Rational p_detect_exact(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                        std::uint32_t q);

// Smallest q with p_detect >= target. Throws UnreachableTarget when f == 0
// (nothing can be detected) and InvalidArgument unless 0 < target < 1.
std::uint32_t min_validators(std::uint32_t k, std::uint32_t f, std::uint32_t r,
                             double target);

struct SweepGrid {
  std::vector<std::uint32_t> k;
  std::vector<std::uint32_t> f;
  std::vector<std::uint32_t> r;
  std::vector<std::uint32_t> q;

  bool empty() const { return k.empty() || f.empty() || r.empty() || q.empty(); }
};

struct SweepRow {
  AuditParams params;
  double p_detect = 0.0;
};

// One row per grid cell, ordered lexicographically by (k, f, r, q). Axis
// values are sorted and deduplicated first.
std::vector<SweepRow> sweep(const SweepGrid& grid);

}  // namespace averify
