#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace flamegrad {

/// splitmix64 step; also used to mix seeds before feeding std::mt19937_64 so
/// nearby seeds produce unrelated streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  return std::mt19937_64(splitmix64(s));
}

/// Uniform double in [0, 1). Implementation-independent (does not rely on
/// std::uniform_real_distribution, whose output is unspecified).
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_real(rng);
}

/// Unbiased uniform integer in [0, n).
inline std::uint32_t uniform_index(std::mt19937_64& rng, std::uint32_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<std::uint32_t>(v % n);
}

/// Standard normal via Box-Muller (two uniforms per draw, deterministic).
inline double normal(std::mt19937_64& rng) {
  double u1 = 1.0 - unit_real(rng);  // (0, 1]
  double u2 = unit_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace flamegrad
