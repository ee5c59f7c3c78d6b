#pragma once

// Counter-based random streams. Every value is a pure function of
// (key, counter), so results never depend on thread scheduling or on how
// many values other streams consumed. Bounded draws use rejection sampling
// rather than std::uniform_int_distribution, whose output differs between
// standard library implementations.

#include <cstdint>
#include <initializer_list>

namespace averify {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a list of words into one stream key.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t key = 0x6a09e667f3bcc908ULL;
  for (auto w : words) key = mix64(key ^ mix64(w));
  return key;
}

class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next_u64() {
    return mix64(key_ ^ mix64(counter_++));
  }

  // Uniform integer in [0, bound). bound must be nonzero.
  constexpr std::uint64_t uniform(std::uint64_t bound) {
    // Reject the low zone so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  constexpr double uniform01() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace averify
