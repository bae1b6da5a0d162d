#pragma once

#include <cmath>
#include <cstdint>

#include "ionxy/constants.hpp"

namespace ionxy {

/// SplitMix64 finaliser; a stateless, platform-independent hash.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: value k of stream (seed, a, b) is a pure function of
/// its arguments, so draws do not depend on evaluation order.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
      : key_(mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t bits(std::uint64_t k) const { return mix64(key_ ^ mix64(k)); }

  /// Uniform in (0, 1).
  double uniform(std::uint64_t k) const { return (static_cast<double>(bits(k) >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by Box–Muller on draws 2k and 2k+1.
  double normal(std::uint64_t k) const {
    const double u1 = uniform(2 * k), u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace ionxy
