#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fta {

/// SplitMix64 finalizer. Used to turn loosely related integers (master seed,
/// run index, stream tag) into well-separated generator seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derives the seed of sub-stream `stream` of a master seed. Chain calls to
/// key a stream by more than one integer.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

// Fixed stream tags so independent draws never share a generator.
inline constexpr std::uint64_t kStreamPrototypes = 0x70726f746full;  // "proto"
inline constexpr std::uint64_t kStreamNoise = 0x6e6f697365ull;       // "noise"
inline constexpr std::uint64_t kStreamGroups = 0x67727073ull;        // "grps"
inline constexpr std::uint64_t kStreamBank = 0x62616e6bull;          // "bank"
inline constexpr std::uint64_t kStreamDataset = 0x64736574ull;       // "dset"
inline constexpr std::uint64_t kStreamFolds = 0x666f6c64ull;         // "fold"

/// Deterministic random source used everywhere randomness is needed.
///
/// The engine is std::mt19937_64 (fully specified by the standard). The
/// uniform and normal mappings are implemented here rather than with
/// std::*_distribution, whose output is implementation-defined; with this
/// class the same seed produces bit-identical draws on every platform.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  /// Standard normal via the Box-Muller transform. Draws two uniforms per
  /// pair; the second value of the pair is cached and returned by the next
  /// call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fta
