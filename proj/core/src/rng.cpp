#include "spkleak/rng.hpp"

#include <limits>

namespace spkleak {

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t x, r;
  do {
    x = next();
    r = x % bound;
  } while (x - r > max - (bound - 1));
  return r;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x00000100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return SplitMix64(master ^ fnv1a64(label)).next();
}

}  // namespace spkleak
