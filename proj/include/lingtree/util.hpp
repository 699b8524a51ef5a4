#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace lingtree {

// splitmix64 finalizer. Used to derive independent RNG seeds from one
// top-level seed plus a string tag, so that every random stream in a run
// is a pure function of (seed, tag).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(tag));
}

// Converts engine output to a double in [0, 1) using the top 53 bits.
// uniform_real_distribution is implementation-defined; this is not.
template <typename Engine>
double next_unit_double(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [1, n] (n small; modulo bias is irrelevant here but
// the draw must be identical across platforms).
template <typename Engine>
int next_int_in(Engine& eng, int n) {
  return static_cast<int>(eng() % static_cast<std::uint64_t>(n)) + 1;
}

// Shortest-ish decimal that still round-trips far below 1e-9: %.12g
// prints 0.3 as "0.3", not "0.299999999999999988".
inline std::string format_double(double x, int significant = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, x);
  return buf;
}

inline std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

// Full-precision form used where byte-exact round-trips are required.
inline std::string format_exact(double x) { return format_double(x, 17); }

}  // namespace lingtree
