#include <cmath>
#include <random>

#include "averify/error.hpp"
#include "averify/verify.hpp"
#include "doctest.h"
#include "oracles/enumeration.hpp"

using namespace averify;

namespace {

ModelConfig ref() { return {"ref", 42, 256, 4096}; }

ClaimedOutput honest792() {
  return make_honest_claim(ref(), {{1, 2, 3}, SequenceRole::prompt}, 792, 20);
}

ClaimedOutput tampered_in(const ClaimedOutput& honest,
                          std::vector<std::size_t> segs) {
  ModelConfig alt = ref();
  alt.model_id = "cheap";
  return apply_tamper(honest, {TamperStrategy::segment_injection,
                               std::move(segs), AltModelSource{alt},
                               SuffixPolicy::consistent});
}

}  // namespace

TEST_CASE("honest claim matches on every span (exhaustive, small output)") {
  const auto claim =
      make_honest_claim(ref(), {{9}, SequenceRole::prompt}, 40, 4);
  for (std::size_t s = 0; s < 40; ++s) {
    for (std::size_t e = s + 1; e <= 40; ++e) {
      const auto o = verify_span(ref(), claim, {s, e});
      REQUIRE(o.matched());
      REQUIRE_FALSE(o.first_mismatch);
      REQUIRE(o.cost == CostLedger{1 + s, e - s});
    }
  }
}

TEST_CASE("tampered segment 3 mismatches at the first diff position") {
  const auto honest = honest792();
  const auto tampered = tampered_in(honest, {3});
  const auto diffs = oracle::diff(honest.tokens.tokens, tampered.tokens.tokens);
  REQUIRE_FALSE(diffs.empty());
  const auto span = honest.segmentation.spans[3];
  REQUIRE(span.contains(diffs.front()));
  const auto o = verify_span(ref(), tampered, span);
  CHECK(o.verdict == Verdict::mismatch);
  REQUIRE(o.first_mismatch);
  CHECK(*o.first_mismatch == diffs.front());
  CHECK(span.contains(*o.first_mismatch));
  // Early exit: decode stops at the mismatching token.
  CHECK(o.cost.decode_tokens == diffs.front() - span.start + 1);
  CHECK(o.cost.prefill_tokens == 3 + span.start);
}

TEST_CASE("last 50 tokens of an honest 792-token output") {
  const auto claim = honest792();
  const auto o = verify_span(ref(), claim, {742, 792});
  CHECK(o.matched());
  CHECK(o.cost.prefill_tokens == 3 + 742);
  CHECK(o.cost.decode_tokens == 50);
}

TEST_CASE("verifying the whole output costs a full generation") {
  const auto claim = honest792();
  const auto o = verify_span(ref(), claim, {0, 792});
  CHECK(o.matched());
  CHECK(o.cost.decode_tokens == 792);
  CHECK(o.cost.prefill_tokens == 3);
}

TEST_CASE("verify_segment completeness") {
  const auto honest = honest792();
  const auto tampered = tampered_in(honest, {3, 11});
  for (std::size_t i = 0; i < 20; ++i) {
    CAPTURE(i);
    CHECK(verify_segment(ref(), honest, i).matched());
    const bool bad = (i == 3 || i == 11);
    CHECK(verify_segment(ref(), tampered, i).matched() == !bad);
  }
  CHECK_THROWS_AS(verify_segment(ref(), honest, 20), RangeError);
}

TEST_CASE("verify_segment completeness over random tamper plans (property)") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 1 + rng() % 20;
    const std::size_t m = k + rng() % 200;
    ModelConfig config{"p", rng(), 2 + static_cast<std::uint32_t>(rng() % 300),
                       4096};
    const auto honest =
        make_honest_claim(config, {{1}, SequenceRole::prompt}, m, k);
    const std::size_t f = 1 + rng() % k;
    ModelConfig alt = config;
    alt.seed += 1;
    const auto tampered = apply_tamper(
        honest, {f == k ? TamperStrategy::full_replacement
                        : TamperStrategy::segment_injection,
                 sample_tamper_indices(k, f, rng()), AltModelSource{alt}});
    for (std::size_t i = 0; i < k; ++i) {
      REQUIRE(verify_segment(config, tampered, i).matched() ==
              !tampered.ground_truth_tamper->is_tampered(i));
    }
  }
}

TEST_CASE("verify_token") {
  const auto honest = honest792();
  for (std::size_t j : {0, 1, 400, 791}) {
    const auto o = verify_token(ref(), honest, j);
    CHECK(o.matched());
    CHECK(o.cost == CostLedger{3 + j, 1});
  }
  auto bad = honest;
  bad.tokens.tokens[100] = (bad.tokens.tokens[100] + 1) % 256;
  const auto o = verify_token(ref(), bad, 100);
  CHECK(o.verdict == Verdict::mismatch);
  CHECK(o.first_mismatch == 100);
  // Tokens after the edit are checked against the edited context.
  CHECK(verify_token(ref(), bad, 99).matched());
  CHECK_THROWS_AS(verify_token(ref(), honest, 792), RangeError);
}

TEST_CASE("span errors") {
  const auto claim = honest792();
  CHECK_THROWS_AS(verify_span(ref(), claim, {5, 5}), RangeError);
  CHECK_THROWS_AS(verify_span(ref(), claim, {6, 5}), RangeError);
  CHECK_THROWS_AS(verify_span(ref(), claim, {700, 793}), RangeError);
  CHECK_THROWS_AS(verify_with_drift(ref(), {0.1, 1}, claim, {0, 0}),
                  RangeError);
}

TEST_CASE("a validator on a different model rejects honest output") {
  const auto claim = honest792();
  ModelConfig other = ref();
  other.seed = 43;
  int mismatches = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    if (!verify_segment(other, claim, i).matched()) ++mismatches;
  }
  CHECK(mismatches == 20);
}

TEST_CASE("drift extremes") {
  const auto claim = honest792();
  for (const Span span : {Span{0, 10}, Span{742, 792}, Span{300, 301}}) {
    CHECK(verify_with_drift(ref(), {0.0, 3}, claim, span) ==
          verify_span(ref(), claim, span));
    const auto o = verify_with_drift(ref(), {1.0, 3}, claim, span);
    CHECK(o.verdict == Verdict::mismatch);
    CHECK(o.first_mismatch == span.start);
    CHECK(o.cost.decode_tokens == 1);
  }
}

TEST_CASE("drift false-mismatch rate on 50-token spans") {
  const double eps = 0.02;
  const auto claim =
      make_honest_claim(ref(), {{1, 2, 3}, SequenceRole::prompt}, 2000, 20);
  std::mt19937_64 rng(31);
  const int spans = 1000;
  int mismatches = 0;
  for (int i = 0; i < spans; ++i) {
    const std::size_t start = rng() % (2000 - 50);
    const DriftSpec drift{eps, rng()};
    if (!verify_with_drift(ref(), drift, claim, {start, start + 50}).matched()) {
      ++mismatches;
    }
  }
  const double p = 1 - std::pow(1 - eps, 50);
  const double sigma = std::sqrt(p * (1 - p) / spans);
  CHECK(std::abs(mismatches / double(spans) - p) <= 3 * sigma);
}
