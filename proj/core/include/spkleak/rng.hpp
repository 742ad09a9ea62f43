#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace spkleak {

/// splitmix64 (Vigna). The forward sequence is identical on every platform;
/// reference outputs for seed 0 begin 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4.
/// All randomized pipeline stages (split membership, synthetic sampling,
/// parameter init, batch shuffling) draw from this generator so that a run is
/// pinned by its seeds alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_unit_open() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t bound);

  /// Standard normal via Box-Muller; consumes exactly two raw draws.
  double next_gaussian() {
    double u1 = next_unit_open();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);

/// Stage seed = one splitmix64 step of (master XOR fnv1a64(label)). Every
/// pipeline stage derives its own seed from the master seed and a stable
/// label, so stages can be re-run independently yet reproducibly.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// In-place Fisher-Yates, descending. The (generator state, element order)
/// pair fully determines the permutation.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace spkleak
