#include "averify/seqlab.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "averify/error.hpp"

namespace averify {

const Span& Segmentation::at(std::size_t index) const {
  if (index >= spans.size()) {
    throw RangeError("segment index " + std::to_string(index) +
                     " out of range for k=" + std::to_string(spans.size()));
  }
  return spans[index];
}

std::size_t Segmentation::segment_of(std::size_t position) const {
  if (position >= total_len) {
    throw RangeError("token position " + std::to_string(position) +
                     " outside output of length " + std::to_string(total_len));
  }
  auto it = std::upper_bound(
      spans.begin(), spans.end(), position,
      [](std::size_t pos, const Span& s) { return pos < s.end; });
  return static_cast<std::size_t>(it - spans.begin());
}

void Segmentation::validate() const {
  if (spans.empty()) throw InvalidPartition("segmentation has no spans");
  if (spans.size() > total_len) {
    throw InvalidPartition("more segments than tokens");
  }
  std::size_t cursor = 0;
  std::size_t smallest = total_len;
  std::size_t largest = 0;
  for (const auto& s : spans) {
    if (s.start != cursor || s.end <= s.start) {
      throw InvalidPartition("spans must be contiguous and non-empty");
    }
    smallest = std::min(smallest, s.size());
    largest = std::max(largest, s.size());
    cursor = s.end;
  }
  if (cursor != total_len) {
    throw InvalidPartition("spans cover " + std::to_string(cursor) + " of " +
                           std::to_string(total_len) + " tokens");
  }
  if (largest - smallest > 1) {
    throw InvalidPartition("span sizes differ by more than one token");
  }
}

Segmentation segment(std::size_t m, std::size_t k) {
  if (k == 0 || k > m) {
    throw InvalidPartition("cannot split " + std::to_string(m) +
                           " tokens into " + std::to_string(k) + " segments");
  }
  Segmentation seg{m, {}};
  seg.spans.reserve(k);
  const std::size_t base = m / k;
  const std::size_t extra = m % k;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    seg.spans.push_back({cursor, cursor + len});
    cursor += len;
  }
  return seg;
}

const char* to_string(TamperStrategy strategy) {
  return strategy == TamperStrategy::full_replacement ? "full_replacement"
                                                      : "segment_injection";
}

TamperStrategy tamper_strategy_from_string(const std::string& text) {
  if (text == "full_replacement") return TamperStrategy::full_replacement;
  if (text == "segment_injection") return TamperStrategy::segment_injection;
  throw InvalidArgument("unknown tamper strategy '" + text + "'");
}

bool TamperPlan::is_tampered(std::size_t segment_index) const {
  return std::binary_search(tampered_indices.begin(), tampered_indices.end(),
                            segment_index);
}

void TamperPlan::validate(std::size_t k) const {
  if (tampered_indices.empty()) {
    throw InvalidArgument("tamper plan must touch at least one segment");
  }
  if (!std::is_sorted(tampered_indices.begin(), tampered_indices.end()) ||
      std::adjacent_find(tampered_indices.begin(), tampered_indices.end()) !=
          tampered_indices.end()) {
    throw InvalidArgument("tampered indices must be sorted and unique");
  }
  if (tampered_indices.back() >= k) {
    throw InvalidArgument("tampered index " +
                          std::to_string(tampered_indices.back()) +
                          " out of range for k=" + std::to_string(k));
  }
  if (strategy == TamperStrategy::full_replacement &&
      tampered_indices.size() != k) {
    throw InvalidArgument("full_replacement must tamper every segment");
  }
}

void ClaimedOutput::validate() const {
  claimed_config.validate();
  segmentation.validate();
  if (segmentation.total_len != tokens.size()) {
    throw InvalidArgument("claim has " + std::to_string(tokens.size()) +
                          " tokens but declares " +
                          std::to_string(segmentation.total_len));
  }
  prompt.check_vocab(claimed_config.vocab_size);
  tokens.check_vocab(claimed_config.vocab_size);
}

ClaimedOutput make_honest_claim(const ModelConfig& config,
                                const TokenSequence& prompt, std::size_t m,
                                std::size_t k) {
  ClaimedOutput claim;
  claim.prompt = prompt;
  claim.prompt.role = SequenceRole::prompt;
  claim.claimed_config = config;
  claim.tokens = generate(config, claim.prompt, m);
  claim.segmentation = segment(m, k);
  return claim;
}

const char* to_string(SuffixPolicy policy) {
  return policy == SuffixPolicy::consistent ? "consistent" : "splice";
}

SuffixPolicy suffix_policy_from_string(const std::string& text) {
  if (text == "consistent") return SuffixPolicy::consistent;
  if (text == "splice") return SuffixPolicy::splice;
  throw InvalidArgument("unknown suffix policy '" + text + "'");
}

ClaimedOutput apply_tamper(const ClaimedOutput& honest, const TamperPlan& plan) {
  if (honest.ground_truth_tamper) {
    throw InvalidArgument("claim is already tampered");
  }
  honest.validate();
  plan.validate(honest.segmentation.k());
  const ModelConfig& claimed = honest.claimed_config;
  const auto vocab = claimed.vocab_size;

  const auto* alt = std::get_if<AltModelSource>(&plan.replacement_source);
  const auto* fixed = std::get_if<FixedPayloadSource>(&plan.replacement_source);
  if (alt) {
    alt->model.validate();
    if (alt->model.vocab_size != vocab) {
      throw InvalidArgument("alternative model must share the claimed "
                            "model's vocabulary size");
    }
  } else {
    fixed->payload.check_vocab(vocab);
  }

  // Both decoders track the claimed context as it is rewritten.
  Decoder reference(claimed, honest.prompt.tokens);
  std::optional<Decoder> alt_decoder;
  if (alt) alt_decoder.emplace(alt->model, honest.prompt.tokens);

  ClaimedOutput out = honest;
  auto& tokens = out.tokens.tokens;
  const auto& original = honest.tokens.tokens;
  bool diverged = false;
  for (std::size_t s = 0; s < honest.segmentation.k(); ++s) {
    const Span& span = honest.segmentation.spans[s];
    const bool tampered = plan.is_tampered(s);
    if (!tampered && !(diverged && plan.suffix == SuffixPolicy::consistent)) {
      for (std::size_t i = span.start; i < span.end; ++i) {
        reference.push(tokens[i]);
        if (alt_decoder) alt_decoder->push(tokens[i]);
      }
      continue;
    }
    if (!tampered) {
      // Consistent suffix: the claimed model continues from the tampered text.
      for (std::size_t i = span.start; i < span.end; ++i) {
        tokens[i] = reference.step();
        if (alt_decoder) alt_decoder->push(tokens[i]);
      }
      continue;
    }

    std::vector<TokenId> replacement;
    if (alt_decoder) {
      Decoder branch = *alt_decoder;
      for (std::size_t i = span.start; i < span.end; ++i) {
        replacement.push_back(branch.step());
      }
    } else {
      const auto& payload = fixed->payload.tokens;
      if (payload.size() < span.size()) {
        throw PayloadSize("payload of " + std::to_string(payload.size()) +
                          " tokens cannot fill a " +
                          std::to_string(span.size()) + "-token segment");
      }
      replacement.assign(payload.begin(),
                         payload.begin() + static_cast<std::ptrdiff_t>(span.size()));
    }

    // Forced difference: the segment must be detectably bad, i.e. differ from
    // what the claimed model would produce here.
    std::vector<TokenId> expected;
    if (plan.suffix == SuffixPolicy::consistent) {
      Decoder branch = reference;
      for (std::size_t i = span.start; i < span.end; ++i) {
        expected.push_back(branch.step());
      }
    } else {
      expected.assign(original.begin() + static_cast<std::ptrdiff_t>(span.start),
                      original.begin() + static_cast<std::ptrdiff_t>(span.end));
    }
    if (replacement == expected) {
      replacement.front() = (replacement.front() + 1) % vocab;
    }

    for (std::size_t i = span.start; i < span.end; ++i) {
      tokens[i] = replacement[i - span.start];
      reference.push(tokens[i]);
      if (alt_decoder) alt_decoder->push(tokens[i]);
    }
    diverged = true;
  }
  out.ground_truth_tamper = plan;
  return out;
}

std::vector<std::size_t> divergent_positions(const ClaimedOutput& claim) {
  Decoder decoder(claim.claimed_config, claim.prompt.tokens);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < claim.tokens.size(); ++i) {
    const TokenId t = claim.tokens.tokens[i];
    if (decoder.peek() != t) out.push_back(i);
    decoder.push(t);
  }
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    CounterStream& stream) {
  if (count > n) {
    throw InvalidArgument("cannot draw " + std::to_string(count) +
                          " distinct items from " + std::to_string(n));
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(stream.uniform(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> sample_tamper_indices(std::size_t k, std::size_t f,
                                               std::uint64_t rng_seed) {
  if (f == 0 || f > k) {
    throw InvalidArgument("need 1 <= f <= k, got f=" + std::to_string(f) +
                          ", k=" + std::to_string(k));
  }
  CounterStream stream(derive_key({rng_seed, 0x7461'6d70'6572ULL}));
  return sample_without_replacement(k, f, stream);
}

std::vector<std::size_t> diff_positions(std::span<const TokenId> a,
                                        std::span<const TokenId> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("diff_positions requires equal lengths");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) out.push_back(i);
  }
  return out;
}

}  // namespace averify
