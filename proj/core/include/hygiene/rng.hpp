#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace hygiene {

/// SplitMix64 generator (Steele, Lea & Flood 2014).
///
/// The algorithm is spelled out here so that splits, folds and synthetic data
/// can be reproduced bit-for-bit by any other implementation:
///
///   state += 0x9E3779B97F4A7C15
///   z  = state
///   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
///
/// Derived draws:
///   uniform01()        = (out >> 11) * 2^-53                 in [0, 1)
///   uniform_index(n)   = out % n, rejecting out < (2^64 - n) % n
///   normal()           = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)   (Box-Muller, one draw per pair)
///   shuffle(v)         = Fisher-Yates from the back, j = uniform_index(i + 1)
///
/// The standard library distributions are avoided on purpose: their output
/// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  double normal() noexcept;
  double log_uniform(double lo, double hi) noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// SplitMix64 output finalizer applied to a single value.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for a labelled sub-stream: folds `tags` into `base` one at a
/// time with mix64(seed ^ mix64(tag + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

}  // namespace hygiene
