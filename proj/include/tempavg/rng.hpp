#pragma once

#include <cstdint>
#include <random>

namespace tempavg {

using Rng = std::mt19937_64;

/// Independent stream for Monte-Carlo trial `index` under `master_seed`.
inline Rng trial_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// The helpers below only consume raw engine output, so draws are identical
// across standard library implementations.

/// `count` (<= 64) independent uniform bits.
inline std::uint64_t random_bits(Rng& rng, int count) {
  if (count <= 0) return 0;
  const std::uint64_t v = rng();
  return count >= 64 ? v : (v & ((std::uint64_t{1} << count) - 1));
}

/// Uniform integer in [0, bound), bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  int bits = 0;
  while ((std::uint64_t{1} << bits) < bound && bits < 64) ++bits;
  for (;;) {
    const std::uint64_t v = random_bits(rng, bits);
    if (v < bound) return v;
  }
}

}  // namespace tempavg
