#pragma once

#include <cstdint>
#include <random>

namespace martapprox {

using Engine = std::mt19937_64;

/// Substream seed for (seed, index): two rounds of the SplitMix64 finalizer,
/// the first on seed, the second on the mix of that output with the index.
/// Fixed across versions; CLI outputs depend on it.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

inline Engine make_engine(std::uint64_t seed, std::uint64_t index) {
  return Engine(derive_seed(seed, index));
}

/// Uniform random sign from one engine draw (top bit).
inline double rademacher(Engine& eng) { return (eng() >> 63) != 0 ? 1.0 : -1.0; }

}  // namespace martapprox
