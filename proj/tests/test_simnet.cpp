#include <cmath>
#include <map>

#include "averify/error.hpp"
#include "averify/simnet.hpp"
#include "doctest.h"

using namespace averify;

namespace {

ModelConfig ref() { return {"ref", 42, 256, 4096}; }

ClaimTemplate tmpl(std::size_t m, std::size_t k) {
  return make_claim_template(ref(), {{1, 2, 3}, SequenceRole::prompt}, m, k);
}

ClaimedOutput tampered_claim(const ClaimTemplate& t,
                             std::vector<std::size_t> segs) {
  const auto strategy = segs.size() == t.honest.segmentation.k()
                            ? TamperStrategy::full_replacement
                            : TamperStrategy::segment_injection;
  return apply_tamper(t.honest, {strategy, std::move(segs), t.source});
}

double sigma3(double p, double n) { return 3 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST_CASE("draw_assignment basics") {
  const auto full = draw_assignment(7, 7, 2, 123, 9);
  CHECK(full.chosen_segments == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  const auto a = draw_assignment(20, 3, 4, 77, 5);
  CHECK(a == draw_assignment(20, 3, 4, 77, 5));
  CHECK(a.validator_id == 4);
  CHECK(a.chosen_segments.size() == 3);
  CHECK(std::adjacent_find(a.chosen_segments.begin(), a.chosen_segments.end()) ==
        a.chosen_segments.end());
  CHECK(a.chosen_segments.back() < 20);
  CHECK_FALSE(a.rng_seed == draw_assignment(20, 3, 5, 77, 5).rng_seed);
  CHECK_FALSE(a.rng_seed == draw_assignment(20, 3, 4, 77, 6).rng_seed);
  CHECK_THROWS_AS(draw_assignment(5, 6, 0, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(draw_assignment(5, 0, 0, 0, 0), InvalidArgument);
}

TEST_CASE("draw_assignment pins the stream layout") {
  // Frozen so any change to seeding or sampling shows up here.
  const auto a = draw_assignment(20, 4, 3, 2025, 17);
  const auto b = draw_assignment(20, 4, 3, 2025, 17);
  CHECK(a.chosen_segments == b.chosen_segments);
  CHECK(a.rng_seed == derive_key({2025, 0x76616c6964ULL, 17, 3}));
}

TEST_CASE("k=5, r=2 pairs are uniform") {
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    ++counts[draw_assignment(5, 2, 0, 31337, static_cast<std::uint64_t>(t))
                 .chosen_segments];
  }
  REQUIRE(counts.size() == 10);
  const double sd = std::sqrt(draws * 0.1 * 0.9);
  for (const auto& [pair, c] : counts) CHECK(std::abs(c - draws * 0.1) <= 3 * sd);
}

TEST_CASE("run_trial on an honest claim never detects") {
  const auto t = tmpl(200, 20);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    for (auto mode : {SimMode::oracle, SimMode::full}) {
      const auto o = run_trial(t.honest, {20, 0, 3, 4}, 9, trial, mode);
      CHECK_FALSE(o.detected);
      CHECK_FALSE(o.rejected);
      CHECK_FALSE(o.broadcast);
      CHECK(o.detecting_validators.empty());
    }
  }
}

TEST_CASE("run_trial on a fully replaced claim always detects") {
  const auto t = tmpl(200, 20);
  std::vector<std::size_t> all(20);
  for (std::size_t i = 0; i < 20; ++i) all[i] = i;
  const auto claim = tampered_claim(t, all);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    for (auto mode : {SimMode::oracle, SimMode::full}) {
      const auto o = run_trial(claim, {20, 20, 1, 1}, 4, trial, mode);
      CHECK(o.detected);
      CHECK(o.rejected);
      REQUIRE(o.broadcast);
      CHECK(o.broadcast->validator_id == 0);
    }
  }
}

TEST_CASE("full mode records real verification work") {
  const auto t = tmpl(200, 20);
  const auto claim = tampered_claim(t, {4, 9});
  const auto o = run_trial(claim, {20, 2, 2, 5}, 1, 3, SimMode::full);
  REQUIRE(o.per_validator_outcomes.size() == 5);
  CostLedger sum;
  for (const auto& v : o.per_validator_outcomes) {
    CHECK(v.outcomes.size() == 2);
    bool any = false;
    for (const auto& out : v.outcomes) {
      sum += out.cost;
      any = any || !out.matched();
    }
    CHECK(v.detected == any);
  }
  CHECK(sum == o.total_cost);
  CHECK(o.total_cost.decode_tokens > 0);
  CHECK(o.detected == !o.detecting_validators.empty());
}

TEST_CASE("run_trial rejects mismatched configurations") {
  const auto t = tmpl(200, 20);
  CHECK_THROWS_AS(run_trial(t.honest, {10, 0, 1, 1}, 0, 0, SimMode::oracle),
                  ConfigurationError);
  CHECK_THROWS_AS(run_trial(t.honest, {20, 2, 1, 1}, 0, 0, SimMode::oracle),
                  ConfigurationError);
  CHECK_THROWS_AS(run_trial(t.honest, {20, 0, 21, 1}, 0, 0, SimMode::oracle),
                  ConfigurationError);
}

TEST_CASE("oracle and full verdicts agree on 1,000 paired trials") {
  const auto t = tmpl(200, 20);
  const AuditParams params{20, 2, 2, 10};
  int detected = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const auto tampered = trial_tamper_indices(20, 2, 555, trial);
    const auto claim = tampered_claim(t, tampered);
    const auto oracle = run_trial(claim, params, 555, trial, SimMode::oracle);
    const auto full = run_trial(claim, params, 555, trial, SimMode::full);
    REQUIRE(oracle.detected == full.detected);
    REQUIRE(oracle.detecting_validators == full.detecting_validators);
    if (full.detected) ++detected;
  }
  CHECK(std::abs(detected / 1000.0 - p_detect(params)) <=
        sigma3(p_detect(params), 1000));
}

TEST_CASE("run_experiment matches the exact value at k=20 f=2 r=1 q=10") {
  const auto t = tmpl(200, 20);
  const AuditParams params{20, 2, 1, 10};
  const auto report = run_experiment(t, params, {10000, 42, SimMode::oracle});
  CHECK(report.trials == 10000);
  CHECK(report.exact_detect == doctest::Approx(0.6513215599).epsilon(1e-10));
  CHECK(report.three_sigma == doctest::Approx(sigma3(report.exact_detect, 10000)));
  CHECK(report.empirical_detect == report.detected_count / 10000.0);
  CHECK(report.abs_error ==
        doctest::Approx(std::abs(report.empirical_detect - report.exact_detect)));
  CHECK(report.within_three_sigma());
}

TEST_CASE("run_experiment small cases") {
  const auto t = tmpl(200, 20);
  const auto one = run_experiment(t, {20, 2, 1, 3}, {1, 5, SimMode::oracle});
  CHECK((one.empirical_detect == 0.0 || one.empirical_detect == 1.0));
  CHECK_THROWS_AS(run_experiment(t, {20, 2, 1, 3}, {0, 5, SimMode::oracle}),
                  ConfigurationError);
  CHECK_THROWS_AS(run_experiment(t, {10, 2, 1, 3}, {10, 5, SimMode::oracle}),
                  ConfigurationError);
  const auto honest = run_experiment(t, {20, 0, 4, 6}, {500, 5, SimMode::full});
  CHECK(honest.detected_count == 0);
  CHECK(honest.within_three_sigma());
}

TEST_CASE("reports are reproducible and thread-count independent") {
  const auto t = tmpl(120, 20);
  const AuditParams params{20, 2, 2, 4};
  for (auto mode : {SimMode::oracle, SimMode::full}) {
    ExperimentOptions opt{300, 99, mode, 1, true};
    const auto a = run_experiment(t, params, opt);
    opt.threads = 4;
    const auto b = run_experiment(t, params, opt);
    CHECK(a.detected_count == b.detected_count);
    CHECK(a.total_cost == b.total_cost);
    REQUIRE(a.trial_outcomes.size() == b.trial_outcomes.size());
    for (std::size_t i = 0; i < a.trial_outcomes.size(); ++i) {
      CHECK(a.trial_outcomes[i].trial_id == i);
      CHECK(a.trial_outcomes[i].detecting_validators ==
            b.trial_outcomes[i].detecting_validators);
    }
  }
}

TEST_CASE("oracle fast path agrees with the recorded path") {
  const auto t = tmpl(120, 20);
  const AuditParams params{20, 3, 2, 6};
  const auto fast = run_experiment(t, params, {2000, 8, SimMode::oracle, 1, false});
  const auto slow = run_experiment(t, params, {2000, 8, SimMode::oracle, 1, true});
  CHECK(fast.detected_count == slow.detected_count);
}

TEST_CASE("validators are exchangeable") {
  // Every validator id hits a tampered segment with the same marginal rate.
  const AuditParams params{8, 2, 2, 4};
  const double p_hit = 1 - p_single_fail(8, 2, 2);
  const int trials = 8000;
  std::vector<int> hits(params.q, 0);
  for (int t = 0; t < trials; ++t) {
    const auto tampered = trial_tamper_indices(8, 2, 22, static_cast<std::uint64_t>(t));
    for (std::uint32_t v = 0; v < params.q; ++v) {
      const auto a = draw_assignment(8, 2, v, 22, static_cast<std::uint64_t>(t));
      for (auto s : a.chosen_segments) {
        if (std::binary_search(tampered.begin(), tampered.end(), s)) {
          ++hits[v];
          break;
        }
      }
    }
  }
  for (int h : hits) CHECK(std::abs(h / double(trials) - p_hit) <= sigma3(p_hit, trials));
}

TEST_CASE("fresh tamper placement per trial is uniform") {
  std::vector<int> counts(20, 0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    for (auto s : trial_tamper_indices(20, 2, 3, static_cast<std::uint64_t>(t))) ++counts[s];
  }
  const double p = 2.0 / 20;
  for (int c : counts) CHECK(std::abs(c / double(trials) - p) <= sigma3(p, trials));
  CHECK(trial_tamper_indices(20, 0, 3, 1).empty());
}
