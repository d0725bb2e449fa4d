#include "credence/rng.hpp"

namespace credence {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + kGolden) ^ mix(stream + 0xD1B54A32D192ED03ull))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix(key_ + counter * kGolden);
}

double CounterRng::uniform01(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

}  // namespace credence
