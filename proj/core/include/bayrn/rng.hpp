#pragma once

#include <cstdint>
#include <random>

namespace bayrn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based stream splitting: the seed of sub-stream `stream` of `base`.
/// Streams with different (base, stream) pairs are statistically independent,
/// which lets parallel workers reproduce the sequential results exactly.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) {
  return Rng(derive_seed(base, stream));
}

double standard_normal(Rng& rng);
double uniform(Rng& rng, double lo, double hi);

}  // namespace bayrn
