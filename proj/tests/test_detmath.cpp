#include <cmath>

#include "averify/detmath.hpp"
#include "averify/error.hpp"
#include "doctest.h"
#include "oracles/enumeration.hpp"

using namespace averify;

TEST_CASE("single-validator failure, enumerated") {
  // 18 of 20 single picks avoid the 2 tampered segments.
  CHECK(oracle::single_fail_by_enumeration(20, 2, 1) == doctest::Approx(0.9));
  CHECK(p_single_fail(20, 2, 1) == doctest::Approx(0.9).epsilon(1e-15));
  // C(18,2)=153 of C(20,2)=190 pairs avoid both.
  CHECK(oracle::binomial(18, 2) == 153);
  CHECK(oracle::binomial(20, 2) == 190);
  CHECK(oracle::single_fail_by_enumeration(20, 2, 2) ==
        doctest::Approx(153.0 / 190.0).epsilon(1e-15));
  CHECK(p_single_fail(20, 2, 2) == doctest::Approx(153.0 / 190.0).epsilon(1e-15));
  CHECK(p_single_fail_exact(20, 2, 2) == Rational(153, 190));
  for (std::uint32_t r = 1; r <= 9; ++r) CHECK(p_single_fail(9, 0, r) == 1.0);
}

TEST_CASE("p_single_fail matches enumeration for all k <= 12") {
  for (unsigned k = 1; k <= 12; ++k) {
    for (unsigned f = 0; f <= k; ++f) {
      for (unsigned r = 1; r <= k; ++r) {
        const double brute = oracle::single_fail_by_enumeration(k, f, r);
        REQUIRE(std::abs(p_single_fail(k, f, r) - brute) <= 1e-12);
        REQUIRE(p_single_fail_exact(k, f, r) ==
                Rational(oracle::binomial(k - f, r), oracle::binomial(k, r)));
      }
    }
  }
}

TEST_CASE("detection probabilities at the reported operating points") {
  CHECK(std::abs(p_detect(20, 2, 1, 5) - 0.40951) < 1e-12);
  CHECK(std::abs(p_detect(20, 2, 1, 10) - (1 - std::pow(0.9, 10))) < 1e-12);
  CHECK(std::abs(p_detect(20, 2, 1, 10) - 0.65132) < 5e-6);
  const double r2q10 = 1 - std::pow(153.0 / 190.0, 10);
  CHECK(std::abs(p_detect(20, 2, 2, 10) - r2q10) < 1e-12);
  CHECK(p_detect(20, 2, 2, 10) > 0.88);
  for (auto [k, f, r, q] : {std::tuple{20u, 2u, 1u, 5u}, {20u, 2u, 1u, 10u},
                            {20u, 2u, 2u, 10u}, {7u, 3u, 4u, 2u}}) {
    CHECK(std::abs(p_detect(k, f, r, q) -
                   p_detect_exact(k, f, r, q).convert_to<double>()) < 1e-12);
  }
}

TEST_CASE("edge identities") {
  for (std::uint32_t k = 1; k <= 15; ++k) {
    for (std::uint32_t f = 1; f <= k; ++f) {
      CHECK(p_detect(k, f, k, 1) == 1.0);
      // r > k - f: every choice hits a tampered segment.
      for (std::uint32_t r = k - f + 1; r <= k; ++r) {
        CHECK(p_single_fail(k, f, r) == 0.0);
        CHECK(p_detect(k, f, r, 3) == 1.0);
      }
    }
    for (std::uint32_t r = 1; r <= k; ++r) CHECK(p_detect(k, 0, r, 4) == 0.0);
  }
}

TEST_CASE("monotone in q, r and f over k <= 12") {
  for (std::uint32_t k = 1; k <= 12; ++k) {
    for (std::uint32_t f = 0; f <= k; ++f) {
      for (std::uint32_t r = 1; r <= k; ++r) {
        for (std::uint32_t q = 1; q <= 12; ++q) {
          const double p = p_detect(k, f, r, q);
          REQUIRE(p >= 0.0);
          REQUIRE(p <= 1.0);
          REQUIRE(p_detect(k, f, r, q + 1) >= p);
          if (r < k) REQUIRE(p_detect(k, f, r + 1, q) >= p);
          if (f < k) REQUIRE(p_detect(k, f + 1, r, q) >= p);
        }
      }
    }
  }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(p_single_fail(20, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(p_single_fail(20, 2, 21), InvalidArgument);
  CHECK_THROWS_AS(p_single_fail(20, 21, 1), InvalidArgument);
  CHECK_THROWS_AS(p_detect(20, 2, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(p_single_fail(0, 0, 1), InvalidArgument);
}

TEST_CASE("min_validators") {
  // Iterate q upward until 1 - 0.9^q >= 0.99.
  std::uint32_t brute = 1;
  while (1 - std::pow(0.9, brute) < 0.99) ++brute;
  CHECK(brute == 44);
  CHECK(min_validators(20, 2, 1, 0.99) == 44);
  CHECK(min_validators(20, 2, 2, 0.88) == 10);
  CHECK(p_detect(20, 2, 2, 9) < 0.88);
  CHECK(min_validators(20, 2, 20, 0.999999) == 1);
  CHECK(min_validators(5, 1, 5, 0.5) == 1);
  CHECK_THROWS_AS(min_validators(20, 0, 3, 0.5), UnreachableTarget);
  CHECK_THROWS_AS(min_validators(20, 2, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(min_validators(20, 2, 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(min_validators(20, 2, 0, 0.5), InvalidArgument);

  // Agrees with a linear search everywhere on a small grid.
  for (std::uint32_t k = 2; k <= 10; ++k) {
    for (std::uint32_t f = 1; f <= k; ++f) {
      for (std::uint32_t r = 1; r <= k; ++r) {
        for (double target : {0.1, 0.5, 0.9, 0.999}) {
          std::uint32_t q = 1;
          while (p_detect(k, f, r, q) < target) ++q;
          REQUIRE(min_validators(k, f, r, target) == q);
        }
      }
    }
  }
}

TEST_CASE("sweep ordering and shape") {
  SweepGrid grid{{20}, {2}, {4, 3, 2, 1}, {}};
  for (std::uint32_t q = 20; q >= 1; --q) grid.q.push_back(q);
  const auto rows = sweep(grid);
  REQUIRE(rows.size() == 80);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].params.r == 1 + i / 20);
    CHECK(rows[i].params.q == 1 + i % 20);
    CHECK(rows[i].p_detect == p_detect(rows[i].params));
    if (i % 20 != 0) CHECK(rows[i].p_detect >= rows[i - 1].p_detect);
  }
  CHECK(sweep({}).empty());
  CHECK(sweep({{20}, {2}, {1}, {}}).empty());
  const auto one = sweep({{20}, {2}, {1}, {5}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].p_detect == p_detect(20, 2, 1, 5));
  CHECK_THROWS_AS(sweep({{20}, {2}, {21}, {1}}), InvalidArgument);
}
