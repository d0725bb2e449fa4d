// Counter-mode SplitMix64 (constants from the 2014 SplitMix finalizer).
// Stateless and platform-independent: draw t of stream k is a pure function
// of (seed, k, t), so substreams split deterministically and simulations
// replay bit-identically regardless of evaluation order. Version: smx64-v1;
// changing the mixing breaks recorded streams and must bump the tag.
#pragma once

#include <cstdint>

namespace credence {

inline constexpr const char* kRngVersion = "smx64-v1";

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  // 64 uniform bits for a counter value.
  std::uint64_t bits(std::uint64_t counter) const;

  // Uniform double in [0,1) with 53 random bits.
  double uniform01(std::uint64_t counter) const;

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
};

}  // namespace credence
