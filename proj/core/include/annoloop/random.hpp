#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace annoloop {

// Platform-independent helpers on top of std::mt19937_64. The standard
// distributions are implementation-defined, so conversions are done here.

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Deterministic stream keyed by (seed, key); independent of call order.
std::mt19937_64 keyed_stream(std::uint64_t seed, std::string_view key);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng) noexcept;

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) noexcept;

/// Poisson(lambda) by CDF inversion of a single uniform draw.
std::uint64_t poisson_inversion(double u, double lambda) noexcept;

}  // namespace annoloop
