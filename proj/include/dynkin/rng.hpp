#pragma once

#include <cstdint>
#include <limits>

namespace dynkin::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Disjoint sub-channels of one path's randomness.
enum class Channel : std::uint64_t {
  SupSignal = 1,
  InfSignal = 2,
  Gaussian = 3,
  Color = 4,
  Merged = 5,
};

/// Counter-based generator: the i-th output is a hash of (key, i), so any
/// (seed, path, channel) triple names an independent, reproducible stream.
/// Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr CounterStream(std::uint64_t seed, std::uint64_t path, Channel channel)
      : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                   mix64(path * 0xd1b54a32d192ed03ULL + static_cast<std::uint64_t>(channel)))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ ^ mix64(++counter_ * 0x9e3779b97f4a7c15ULL)); }

  // Uniform on (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dynkin::rng
