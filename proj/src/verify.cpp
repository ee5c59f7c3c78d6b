#include "averify/verify.hpp"

#include <span>
#include <string>
#include <vector>

#include "averify/error.hpp"

namespace averify {

const char* to_string(Verdict verdict) {
  return verdict == Verdict::match ? "match" : "mismatch";
}

namespace {

void check_span(const ClaimedOutput& claim, Span span) {
  const auto m = claim.tokens.size();
  if (span.start >= span.end || span.end > m) {
    throw RangeError("span [" + std::to_string(span.start) + ", " +
                     std::to_string(span.end) + ") invalid for output of " +
                     std::to_string(m) + " tokens");
  }
}

std::vector<TokenId> context_before(const ClaimedOutput& claim,
                                    std::size_t start) {
  std::vector<TokenId> context;
  context.reserve(claim.prompt.size() + start);
  context.insert(context.end(), claim.prompt.tokens.begin(),
                 claim.prompt.tokens.end());
  context.insert(context.end(), claim.tokens.tokens.begin(),
                 claim.tokens.tokens.begin() +
                     static_cast<std::ptrdiff_t>(start));
  return context;
}

VerificationOutcome compare(Decoder decoder, const ClaimedOutput& claim,
                            Span span) {
  VerificationOutcome out;
  out.checked_span = span;
  out.cost.prefill_tokens = claim.prompt.size() + span.start;
  for (std::size_t i = span.start; i < span.end; ++i) {
    const TokenId regenerated = decoder.peek();
    ++out.cost.decode_tokens;
    if (regenerated != claim.tokens.tokens[i]) {
      out.verdict = Verdict::mismatch;
      out.first_mismatch = i;
      break;
    }
    decoder.push(regenerated);
  }
  return out;
}

}  // namespace

VerificationOutcome verify_span(const ModelConfig& config,
                                const ClaimedOutput& claim, Span span) {
  check_span(claim, span);
  return compare(Decoder(config, context_before(claim, span.start)), claim,
                 span);
}

VerificationOutcome verify_segment(const ModelConfig& config,
                                   const ClaimedOutput& claim,
                                   std::size_t seg_index) {
  return verify_span(config, claim, claim.segmentation.at(seg_index));
}

VerificationOutcome verify_token(const ModelConfig& config,
                                 const ClaimedOutput& claim, std::size_t j) {
  return verify_span(config, claim, Span{j, j + 1});
}

VerificationOutcome verify_with_drift(const ModelConfig& config,
                                      const DriftSpec& drift,
                                      const ClaimedOutput& claim, Span span) {
  check_span(claim, span);
  return compare(Decoder(config, drift, context_before(claim, span.start)),
                 claim, span);
}

}  // namespace averify
