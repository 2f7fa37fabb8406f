// rng.hpp - Deterministic random streams for Monte-Carlo trials.
//
// Every random draw in the library flows through an explicitly seeded
// RngStream; nothing touches a global generator. Gaussian variates use an
// in-house Box-Muller so that a (master seed, point, trial) tuple produces
// bit-identical results on any standard library.

#pragma once

#include "zakotfs/types.hpp"

#include <cstdint>
#include <random>

namespace zakotfs {

// splitmix64 mixing step; also used to combine seed components.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97f4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministically derive a child seed from a master seed and salts.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t s = master;
  uint64_t out = splitmix64(s);
  s ^= a * 0xA24BAED4963EE407ULL;
  out ^= splitmix64(s);
  s ^= b * 0x9FB21C651E98DF25ULL;
  out ^= splitmix64(s);
  s ^= c * 0xD6E8FEB86659FD93ULL;
  out ^= splitmix64(s);
  return out;
}

class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  // Circularly-symmetric complex Gaussian with E|w|^2 = variance.
  cxd cnormal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    return {s * normal(), s * normal()};
  }

  Vec cnormal_vec(Eigen::Index n, double variance) {
    Vec w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = cnormal(variance);
    return w;
  }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) { return eng_() % n; }

  std::vector<uint8_t> random_bits(size_t count) {
    std::vector<uint8_t> bits(count);
    for (auto& b : bits) b = static_cast<uint8_t>(eng_() & 1);
    return bits;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zakotfs
