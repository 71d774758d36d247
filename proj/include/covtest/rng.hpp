#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>

#include "covtest/stats.hpp"

namespace covtest {

namespace detail {

// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t combine64(std::uint64_t a, std::uint64_t b) {
  return mix64(a + 0x9e3779b97f4a7c15ull + (b ^ (a << 6) ^ (a >> 2)));
}

}  // namespace detail

// Splittable counter-style stream: the state is a hash of the (seed, path)
// key and draws advance a SplitMix64 chain.  Streams derived from distinct
// paths are statistically independent, so replicates can be generated in any
// order and on any number of workers with identical output.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(detail::mix64(seed)) {}

  static RandomStream derive(std::uint64_t seed,
                             std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::mix64(seed ^ 0x6a09e667f3bcc909ull);
    for (std::uint64_t id : path) s = detail::combine64(s, id);
    RandomStream out(0);
    out.state_ = s;
    return out;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0, 1).
  double next_uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via quantile inversion; keeps one draw per deviate so
  // parallel streams stay aligned.
  double next_normal() { return normal_quantile(next_uniform01()); }

  // Uniform on (-sqrt(3), sqrt(3)): mean 0, variance 1, excess kurtosis -1.2.
  double next_uniform_pm_sqrt3() {
    constexpr double root3 = 1.7320508075688772;
    return (2.0 * next_uniform01() - 1.0) * root3;
  }

 private:
  std::uint64_t state_;
};

// Stable 64-bit encoding of a double for use in stream-derivation paths.
inline std::uint64_t key_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace covtest
