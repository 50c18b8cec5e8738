#include "annoloop/random.hpp"

#include <cmath>

namespace annoloop {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::mt19937_64 keyed_stream(std::uint64_t seed, std::string_view key) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ fnv1a64(key)));
}

double uniform01(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) noexcept {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

std::uint64_t poisson_inversion(double u, double lambda) noexcept {
  if (lambda <= 0.0) return 0;
  constexpr std::uint64_t kCap = 10000;
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf && k < kCap) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && k > lambda) break;
  }
  return k;
}

}  // namespace annoloop
