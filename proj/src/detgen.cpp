#include "averify/detgen.hpp"

#include <string>

#include "averify/error.hpp"

namespace averify {

void ModelConfig::validate() const {
  if (vocab_size < 2) {
    throw InvalidArgument("vocab_size must be at least 2, got " +
                          std::to_string(vocab_size));
  }
  if (max_output == 0) throw InvalidArgument("max_output must be positive");
}

const char* to_string(SequenceRole role) {
  switch (role) {
    case SequenceRole::prompt:
      return "prompt";
    case SequenceRole::output:
      return "output";
    case SequenceRole::context:
      return "context";
  }
  return "context";
}

SequenceRole sequence_role_from_string(const std::string& text) {
  if (text == "prompt") return SequenceRole::prompt;
  if (text == "output") return SequenceRole::output;
  if (text == "context") return SequenceRole::context;
  throw InvalidArgument("unknown sequence role '" + text + "'");
}

void TokenSequence::check_vocab(std::uint32_t vocab_size) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= vocab_size) {
      throw InvalidArgument("token " + std::to_string(tokens[i]) +
                            " at position " + std::to_string(i) +
                            " outside vocabulary of size " +
                            std::to_string(vocab_size));
    }
  }
}

TokenSequence concat(const TokenSequence& head, std::span<const TokenId> tail,
                     SequenceRole role) {
  TokenSequence out{head.tokens, role};
  out.tokens.insert(out.tokens.end(), tail.begin(), tail.end());
  return out;
}

void DriftSpec::validate() const {
  // Negated comparison so NaN is rejected too.
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw InvalidArgument("flip_probability must lie in [0,1]");
  }
}

void Fnv1a64::update(std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) update(b);
}

void Fnv1a64::update_u32_le(std::uint32_t value) {
  for (int i = 0; i < 4; ++i) update(static_cast<std::uint8_t>(value >> (8 * i)));
}

void Fnv1a64::update_u64_le(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) update(static_cast<std::uint8_t>(value >> (8 * i)));
}

void Fnv1a64::update_string(const std::string& text) {
  for (char c : text) update(static_cast<std::uint8_t>(c));
}

Fnv1a64 model_hasher(const ModelConfig& config) {
  Fnv1a64 h;
  h.update_string(config.model_id);
  h.update_u64_le(config.seed);
  return h;
}

std::uint64_t context_digest(const ModelConfig& config,
                             std::span<const TokenId> context) {
  auto h = model_hasher(config);
  for (auto t : context) h.update_u32_le(t);
  return h.digest();
}

double drift_coin(std::uint64_t digest, std::uint64_t drift_seed) {
  Fnv1a64 h;
  h.update_u64_le(digest);
  h.update_u64_le(drift_seed);
  constexpr std::uint64_t kMask53 = (std::uint64_t{1} << 53) - 1;
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return static_cast<double>(fmix64(h.digest()) & kMask53) * kScale;
}

namespace {

TokenId token_from_digest(std::uint64_t digest, std::uint32_t vocab_size) {
  return static_cast<TokenId>(fmix64(digest) % vocab_size);
}

TokenId drift_token(std::uint64_t digest, std::uint32_t vocab_size,
                    const DriftSpec& drift) {
  const TokenId honest = token_from_digest(digest, vocab_size);
  if (drift_coin(digest, drift.drift_seed) < drift.flip_probability) {
    return static_cast<TokenId>((std::uint64_t{honest} + 1) % vocab_size);
  }
  return honest;
}

void check_context(const ModelConfig& config, std::span<const TokenId> context) {
  config.validate();
  for (auto t : context) {
    if (t >= config.vocab_size) {
      throw InvalidArgument("context token " + std::to_string(t) +
                            " outside vocabulary of size " +
                            std::to_string(config.vocab_size));
    }
  }
}

}  // namespace

TokenId next_token(const ModelConfig& config, const TokenSequence& context) {
  check_context(config, context.tokens);
  return token_from_digest(context_digest(config, context.tokens),
                           config.vocab_size);
}

TokenId drifted_next_token(const ModelConfig& config, const DriftSpec& drift,
                           const TokenSequence& context) {
  drift.validate();
  check_context(config, context.tokens);
  return drift_token(context_digest(config, context.tokens), config.vocab_size,
                     drift);
}

Decoder::Decoder(const ModelConfig& config, std::span<const TokenId> context)
    : vocab_size_(config.vocab_size), hasher_(model_hasher(config)) {
  check_context(config, context);
  for (auto t : context) hasher_.update_u32_le(t);
}

Decoder::Decoder(const ModelConfig& config, const DriftSpec& drift,
                 std::span<const TokenId> context)
    : Decoder(config, context) {
  drift.validate();
  drifting_ = true;
  drift_ = drift;
}

TokenId Decoder::peek() const {
  if (drifting_) return drift_token(hasher_.digest(), vocab_size_, drift_);
  return token_from_digest(hasher_.digest(), vocab_size_);
}

void Decoder::push(TokenId token) { hasher_.update_u32_le(token); }

TokenId Decoder::step() {
  const TokenId t = peek();
  push(t);
  return t;
}

namespace {

void check_count(const ModelConfig& config, std::size_t m) {
  if (m > config.max_output) {
    throw CapExceeded("requested " + std::to_string(m) +
                      " tokens, max_output is " +
                      std::to_string(config.max_output));
  }
}

TokenSequence run_decoder(Decoder decoder, std::size_t m) {
  TokenSequence out{{}, SequenceRole::output};
  out.tokens.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.tokens.push_back(decoder.step());
  return out;
}

}  // namespace

TokenSequence generate(const ModelConfig& config, const TokenSequence& prompt,
                       std::size_t m) {
  if (m == 0) throw InvalidArgument("generate requires m >= 1");
  return continue_from(config, prompt, m);
}

TokenSequence continue_from(const ModelConfig& config,
                            const TokenSequence& context, std::size_t m) {
  config.validate();
  check_count(config, m);
  return run_decoder(Decoder(config, context.tokens), m);
}

TokenSequence drifted_continue_from(const ModelConfig& config,
                                    const DriftSpec& drift,
                                    const TokenSequence& context,
                                    std::size_t m) {
  config.validate();
  check_count(config, m);
  return run_decoder(Decoder(config, drift, context.tokens), m);
}

}  // namespace averify
