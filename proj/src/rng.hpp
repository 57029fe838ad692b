#pragma once

// Counter-based randomness: every draw is a pure function of (seed, key words), so
// results do not depend on iteration order or on how work is split across threads.

#include <cstdint>
#include <initializer_list>

namespace fractile {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : seed_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t bits(std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = seed_;
    for (std::uint64_t w : key) h = mix64(h ^ mix64(w + 0x243f6a8885a308d3ULL));
    return h;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::initializer_list<std::uint64_t> key) const {
    return static_cast<double>(bits(key) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p, std::initializer_list<std::uint64_t> key) const {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform(key) < p;
  }

  KeyedRng derive(std::uint64_t stream) const { return KeyedRng(bits({0xd1b54a32d192ed03ULL, stream})); }

 private:
  std::uint64_t seed_;
};

}  // namespace fractile
