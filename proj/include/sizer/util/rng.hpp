#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sizer {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed for a named stream (agent init, noise,
/// warm-up, backend, ...). SplitMix64 over the base seed mixed with an
/// FNV-1a hash of the stream name.
std::uint64_t sub_seed(std::uint64_t seed, std::string_view stream);

/// Uniform double in [lo, hi) built from the top 53 bits of one draw.
double uniform(Rng& rng, double lo, double hi);

/// Standard normal via the Marsaglia polar method.
double standard_normal(Rng& rng);

}  // namespace sizer
