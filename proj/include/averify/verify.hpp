#pragma once

// Targeted validation: rebuild the context preceding a token range, regenerate
// the range on the validator's model instance and compare token by token.

#include <cstddef>
#include <optional>

#include "averify/detgen.hpp"
#include "averify/seqlab.hpp"

namespace averify {

// Token counts a verification consumed. Prefill covers supplied context
// tokens (prompt plus the trusted output prefix); decode covers regenerated
// tokens, the expensive phase.
struct CostLedger {
  std::size_t prefill_tokens = 0;
  std::size_t decode_tokens = 0;

  CostLedger& operator+=(const CostLedger& other) {
    prefill_tokens += other.prefill_tokens;
    decode_tokens += other.decode_tokens;
    return *this;
  }
  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

enum class Verdict { match, mismatch };

const char* to_string(Verdict verdict);

struct VerificationOutcome {
  Verdict verdict = Verdict::match;
  std::optional<std::size_t> first_mismatch;  // absolute output index
  Span checked_span;
  CostLedger cost;

  bool matched() const { return verdict == Verdict::match; }
  friend bool operator==(const VerificationOutcome&,
                         const VerificationOutcome&) = default;
};

// Regenerates [span.start, span.end) from prompt ++ tokens[0, span.start) and
// stops at the first disagreement. Throws RangeError for an empty or
// out-of-bounds span.
VerificationOutcome verify_span(const ModelConfig& config,
                                const ClaimedOutput& claim, Span span);

VerificationOutcome verify_segment(const ModelConfig& config,
                                   const ClaimedOutput& claim,
                                   std::size_t seg_index);

VerificationOutcome verify_token(const ModelConfig& config,
                                 const ClaimedOutput& claim, std::size_t j);

// verify_span on a validator whose hardware drifts per DriftSpec.
VerificationOutcome verify_with_drift(const ModelConfig& config,
                                      const DriftSpec& drift,
                                      const ClaimedOutput& claim, Span span);

}  // namespace averify
