#pragma once

// Output segmentation and the adversary's tampering strategies.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "averify/detgen.hpp"
#include "averify/rng.hpp"

namespace averify {

// Half-open token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool contains(std::size_t i) const { return i >= start && i < end; }

  friend bool operator==(const Span&, const Span&) = default;
};

struct Segmentation {
  std::size_t total_len = 0;
  std::vector<Span> spans;

  std::size_t k() const { return spans.size(); }
  const Span& at(std::size_t index) const;
  // Index of the segment holding token position i.
  std::size_t segment_of(std::size_t position) const;

  // Throws InvalidPartition when spans do not tile [0, total_len) with
  // non-empty near-equal pieces.
  void validate() const;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

// Splits m tokens into k spans; the first m mod k spans get one extra token.
Segmentation segment(std::size_t m, std::size_t k);

enum class TamperStrategy { full_replacement, segment_injection };

const char* to_string(TamperStrategy strategy);
TamperStrategy tamper_strategy_from_string(const std::string& text);

struct AltModelSource {
  ModelConfig model;
  friend bool operator==(const AltModelSource&, const AltModelSource&) = default;
};

struct FixedPayloadSource {
  TokenSequence payload;
  friend bool operator==(const FixedPayloadSource&,
                         const FixedPayloadSource&) = default;
};

using ReplacementSource = std::variant<AltModelSource, FixedPayloadSource>;

// What happens to untampered segments after a tampered one.
//   consistent: the adversary regenerates them with the claimed model from the
//               tampered prefix, so only planned segments fail verification.
//   splice:     the honest tokens stay verbatim; an autoregressive validator
//               then also rejects later segments.
enum class SuffixPolicy { consistent, splice };

const char* to_string(SuffixPolicy policy);
SuffixPolicy suffix_policy_from_string(const std::string& text);

struct TamperPlan {
  TamperStrategy strategy = TamperStrategy::segment_injection;
  std::vector<std::size_t> tampered_indices;  // sorted, unique
  ReplacementSource replacement_source;
  SuffixPolicy suffix = SuffixPolicy::consistent;

  std::size_t f() const { return tampered_indices.size(); }
  bool is_tampered(std::size_t segment_index) const;

  // Checks plan invariants against a segmentation with k segments.
  void validate(std::size_t k) const;

  friend bool operator==(const TamperPlan&, const TamperPlan&) = default;
};

// The (prompt, output) pair a validator audits. ground_truth_tamper is
// simulator metadata; validators never read it.
struct ClaimedOutput {
  TokenSequence prompt;
  ModelConfig claimed_config;
  TokenSequence tokens;
  Segmentation segmentation;
  std::optional<TamperPlan> ground_truth_tamper;

  void validate() const;

  friend bool operator==(const ClaimedOutput&, const ClaimedOutput&) = default;
};

// Generates the honest output for prompt and segments it into k pieces.
ClaimedOutput make_honest_claim(const ModelConfig& config,
                                const TokenSequence& prompt, std::size_t m,
                                std::size_t k);

ClaimedOutput apply_tamper(const ClaimedOutput& honest, const TamperPlan& plan);

// Uniform random f-subset of {0..k-1}, sorted, deterministic in rng_seed.
std::vector<std::size_t> sample_tamper_indices(std::size_t k, std::size_t f,
                                               std::uint64_t rng_seed);

// Partial Fisher-Yates over 0..n-1 consuming `stream`; returns the first
// `count` picks, sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    CounterStream& stream);

// Output positions whose token differs from what the claimed model emits
// after prompt ++ tokens[0, i). Empty for an honest claim.
std::vector<std::size_t> divergent_positions(const ClaimedOutput& claim);

// Positions where two equal-length sequences differ.
std::vector<std::size_t> diff_positions(std::span<const TokenId> a,
                                        std::span<const TokenId> b);

}  // namespace averify
