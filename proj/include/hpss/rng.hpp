#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hpss {

// All randomness in the engine flows through these helpers. std::*_distribution
// is implementation-defined, so raw engine words are mapped to values by hand;
// seeded runs are then bit-reproducible across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used for content keys and noise hashing (not security).
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform in [0, 1).
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Modulo bias is irrelevant here; determinism is not.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

inline bool bernoulli(Rng& rng, double p) { return uniform_double(rng) < p; }

// Standard normal via Box-Muller on hand-mapped uniforms.
inline double standard_normal(std::uint64_t word_a, std::uint64_t word_b) {
  double u = (static_cast<double>(word_a >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
  double v = static_cast<double>(word_b >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.141592653589793 * v);
}

// Deterministic noise: a pure function of (seed, key).
inline double seeded_normal(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t a = splitmix64(seed ^ key);
  std::uint64_t b = splitmix64(a);
  return standard_normal(a, b);
}

template <typename T>
void shuffle_inplace(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Sample an index from unnormalized nonnegative masses. Caller guarantees a
// positive total.
inline std::size_t sample_index(Rng& rng, std::span<const double> masses) {
  double total = 0.0;
  for (double m : masses) total += m;
  double x = uniform_double(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc += masses[i];
    if (x < acc) return i;
  }
  return masses.size() - 1;
}

}  // namespace hpss
