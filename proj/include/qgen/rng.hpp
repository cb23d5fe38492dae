#pragma once

#include <cstdint>
#include <string_view>

namespace qgen {

// Fixed 64-bit generator used for every random choice in the pipeline
// (corpus sampling, shuffles, the mock backend). The sequence is part of
// the file-format contract: identical seeds must reproduce identical
// artifacts across platforms and compilers.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); modulo is biased for huge n but deterministic,
  // which is what we trade for here
  uint64_t bounded(uint64_t n) { return n == 0 ? 0 : next() % n; }

  // uniform double in [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t mix64(uint64_t a, uint64_t b) {
  SplitMix64 m(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
  return m.next();
}

}  // namespace qgen
