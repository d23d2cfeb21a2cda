#pragma once

#include <cmath>
#include <cstdint>

namespace bpsurv {

// Counter-based pseudo-random stream built on the SplitMix64 finalizer.
// A stream is identified by a key derived from (seed, stream ids); draws are
// pure functions of (key, counter), so replications, chains and records can
// be generated independently and in any order with identical results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return finalize(finalize(a) ^ (0x9e3779b97f4a7c15ULL + b));
  }

  static RngStream from_ids(std::uint64_t seed, std::uint64_t id1 = 0,
                            std::uint64_t id2 = 0, std::uint64_t id3 = 0) {
    std::uint64_t k = finalize(seed + 0x2545f4914f6cdd1dULL);
    k = mix(k, id1);
    k = mix(k, id2);
    k = mix(k, id3);
    return RngStream(k);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    return finalize(z);
  }

  // Uniform on the open interval (0, 1); 0 and 1 are never returned.
  double uniform01() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u <= 0.0) return 0x1.0p-53;
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller without caching: deterministic two-uniform draw per normal.
  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    return mean + sd * z;
  }

  int bernoulli(double prob) { return uniform01() < prob ? 1 : 0; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bpsurv
