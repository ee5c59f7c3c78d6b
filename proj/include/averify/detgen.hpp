#pragma once

// Deterministic reference generator.
//
// Token choice is a pure function of (model_id, seed, context) computed with a
// 64-bit FNV-1a hash chain. The byte encoding is fixed so any implementation
// reproduces the same tokens:
//
//   digest     = FNV-1a-64( model_id bytes (UTF-8)
//                         | seed (8 bytes LE)
//                         | each token id (4 bytes LE) )
//   next token = fmix64(digest) mod vocab_size
//
// fmix64 is the murmur3 64-bit finalizer. Reducing the raw digest instead
// collapses the chain: the token's first byte equals the digest's low byte
// for vocab sizes divisible by 256, the XOR clears it, and every later token
// is 0. Smaller even vocab sizes pin the low bit the same way.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace averify {

using TokenId = std::uint32_t;

struct ModelConfig {
  std::string model_id;
  std::uint64_t seed = 0;
  std::uint32_t vocab_size = 256;
  std::uint32_t max_output = 4096;

  // Throws InvalidArgument when vocab_size < 2 or max_output == 0.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class SequenceRole { prompt, output, context };

const char* to_string(SequenceRole role);
SequenceRole sequence_role_from_string(const std::string& text);

struct TokenSequence {
  std::vector<TokenId> tokens;
  SequenceRole role = SequenceRole::context;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  // Throws InvalidArgument on the first token >= vocab_size.
  void check_vocab(std::uint32_t vocab_size) const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Concatenation keeps the role of the left operand.
TokenSequence concat(const TokenSequence& head, std::span<const TokenId> tail,
                     SequenceRole role = SequenceRole::context);

struct DriftSpec {
  double flip_probability = 0.0;
  std::uint64_t drift_seed = 0;

  void validate() const;

  friend bool operator==(const DriftSpec&, const DriftSpec&) = default;
};

// Streaming 64-bit FNV-1a.
class Fnv1a64 {
 public:
  static constexpr std::uint64_t kOffsetBasis = 14695981039346656037ULL;
  static constexpr std::uint64_t kPrime = 1099511628211ULL;

  constexpr void update(std::uint8_t byte) {
    state_ ^= byte;
    state_ *= kPrime;
  }
  void update(std::span<const std::uint8_t> bytes);
  void update_u32_le(std::uint32_t value);
  void update_u64_le(std::uint64_t value);
  void update_string(const std::string& text);

  constexpr std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kOffsetBasis;
};

// murmur3 fmix64 finalizer (bijective on 64-bit values).
constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

// Hash state after absorbing model_id and seed. Extending it with context
// token ids yields the digest next_token() reduces.
Fnv1a64 model_hasher(const ModelConfig& config);

std::uint64_t context_digest(const ModelConfig& config,
                             std::span<const TokenId> context);

// Coin in [0,1) for the drift model: fmix64 of FNV-1a over the context
// digest and drift_seed (8 bytes LE each), low 53 bits scaled by 2^-53.
double drift_coin(std::uint64_t digest, std::uint64_t drift_seed);

TokenId next_token(const ModelConfig& config, const TokenSequence& context);

// Incremental decoder: keeps the hash state of the context so each step costs
// O(1) instead of rehashing the whole prefix. Produces exactly the tokens
// next_token()/drifted_next_token() would.
class Decoder {
 public:
  Decoder(const ModelConfig& config, std::span<const TokenId> context);
  Decoder(const ModelConfig& config, const DriftSpec& drift,
          std::span<const TokenId> context);

  // Token the model emits for the current context.
  TokenId peek() const;
  // Appends a token to the context.
  void push(TokenId token);
  // peek() then push() the result.
  TokenId step();

 private:
  std::uint32_t vocab_size_;
  Fnv1a64 hasher_;
  bool drifting_ = false;
  DriftSpec drift_;
};

TokenId drifted_next_token(const ModelConfig& config, const DriftSpec& drift,
                           const TokenSequence& context);

// Y with y_i = next_token(config, prompt ++ y_1..y_{i-1}).
// Throws InvalidArgument for m == 0 and CapExceeded for m > max_output.
TokenSequence generate(const ModelConfig& config, const TokenSequence& prompt,
                       std::size_t m);

// Same recurrence as generate() starting from an arbitrary context; m == 0
// returns an empty sequence.
TokenSequence continue_from(const ModelConfig& config,
                            const TokenSequence& context, std::size_t m);

// continue_from() where each step uses drifted_next_token().
TokenSequence drifted_continue_from(const ModelConfig& config,
                                    const DriftSpec& drift,
                                    const TokenSequence& context,
                                    std::size_t m);

}  // namespace averify
