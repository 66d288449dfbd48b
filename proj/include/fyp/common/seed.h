#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace fyp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a, used to fold labels into seeds.
constexpr std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent child seed from a parent seed and a path of
// integer/label components. Every stochastic stream in the project is rooted
// in an explicit seed through this function.
inline std::uint64_t DeriveSeed(std::uint64_t parent,
                                std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = Mix64(parent);
  for (std::uint64_t p : parts) s = Mix64(s ^ Mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

inline std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view label) {
  return DeriveSeed(parent, {HashLabel(label)});
}

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace fyp
