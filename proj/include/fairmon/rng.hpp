#pragma once

#include <cstdint>
#include <limits>

namespace fairmon {

__extension__ using uint128_t = unsigned __int128;

/// SplitMix64: a counter-based generator. The state is a plain counter, so a
/// stream is fully determined by its seed and independent seeds can be derived
/// with `derive`.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) for n >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) {
    uint128_t m = static_cast<uint128_t>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128_t>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Seed for an independent child stream, e.g. one per run or sub-monitor.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
    return g();
  }

 private:
  std::uint64_t state_;
};

}  // namespace fairmon
