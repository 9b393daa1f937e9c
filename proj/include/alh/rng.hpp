#pragma once
// Counter-based seeded random streams.
//
// Every source of randomness in the library is a RandomStream identified by a
// 64-bit key. Output i of a stream is a pure function of (key, i), so streams
// are reproducible, cheap to copy (common-random-number coupling is "pass the
// stream by value"), and shardable by deriving child keys.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace alh {

// SplitMix64 finalizer; also used as the key-derivation hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derive a child key from a seed and a path of tags. Different paths give
// statistically independent streams.
inline std::uint64_t derive_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ull);
  for (std::uint64_t tag : path) {
    k = mix64(k ^ (tag + 0x9e3779b97f4a7c15ull) * 0xd1342543de82ef95ull);
  }
  return k;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    return mix64(key_ + (ctr_++) * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, 1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline RandomStream substream(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> path) {
  return RandomStream(derive_key(seed, path));
}

}  // namespace alh
