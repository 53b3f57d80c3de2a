#pragma once

// Deterministic sampling helpers. std::uniform_int_distribution and
// std::normal_distribution are implementation-defined, so reproducible runs
// draw through these instead. mt19937_64 itself is fully specified.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "ideabench/errors.hpp"

namespace ideabench::rng {

// FNV-1a, 64-bit. Stable across platforms; used to derive stub-embedding seeds.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Unbiased draw from [0, m) via rejection sampling.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t m) {
  if (m == 0) throw DomainError("bounded draw needs m > 0");
  std::uint64_t threshold = (0 - m) % m;
  for (;;) {
    std::uint64_t x = gen();
    if (x >= threshold) return x % m;
  }
}

// Uniform double in (0, 1]; 53 bits of the raw draw, never exactly 0.
inline double unit_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;
}

// Box-Muller, cosine branch only. Stateless by design: two uniforms per call.
inline double standard_normal(std::mt19937_64& gen) {
  double u1 = unit_open(gen);
  double u2 = unit_open(gen);
  double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace ideabench::rng
