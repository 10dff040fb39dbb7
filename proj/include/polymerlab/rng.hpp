#pragma once

// Counter-seeded random streams. Every (seed, replica) pair and every
// (seed, replica, site) triple hashes to its own independent stream, so
// disorder fields come out bitwise identical no matter how replicas are
// scheduled across workers, and two families can share site-level draws
// for common-random-number comparisons.

#include <cmath>
#include <cstdint>

namespace polymerlab {

// SplitMix64 step (Steele, Lea, Flood 2014). Also used as the mixing hash.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  explicit RngStream(uint64_t state) : s_(state) {}

  static RngStream for_replica(uint64_t base_seed, uint64_t replica) {
    return RngStream(splitmix64(base_seed ^ splitmix64(replica + 0x632be59bd9b4e019ULL)));
  }

  static RngStream for_site(uint64_t base_seed, uint64_t replica, int i, int j) {
    uint64_t h = splitmix64(base_seed ^ splitmix64(replica + 0x632be59bd9b4e019ULL));
    h ^= splitmix64((uint64_t(uint32_t(i)) << 32 | uint32_t(j)) ^ 0xa4093822299f31d0ULL);
    return RngStream(splitmix64(h));
  }

  uint64_t next_u64() {
    s_ += 0x9e3779b97f4a7c15ULL;
    uint64_t x = s_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform on (0,1), endpoints excluded.
  double u01() {
    const double u = double(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  // Standard normal, Marsaglia polar method with the usual pair cache.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double a, b, s;
    do {
      a = 2.0 * u01() - 1.0;
      b = 2.0 * u01() - 1.0;
      s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = a * f;
    has_spare_ = true;
    return b * f;
  }

  // Gamma(theta, 1) via Marsaglia-Tsang squeeze/rejection
  // (ACM Trans. Math. Soft. 26 (3), 2000). Valid for theta >= 1.
  double gamma_variate(double theta) {
    if (theta < 1.0) return std::exp(log_gamma_variate(theta));
    const double d = theta - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // log of a Gamma(theta, 1) draw. The theta < 1 case boosts to theta + 1
  // and applies the U^{1/theta} correction in log space, which keeps tiny
  // variates from underflowing (they matter: -log of them is the disorder).
  double log_gamma_variate(double theta) {
    if (theta < 1.0) {
      return std::log(gamma_variate(theta + 1.0)) + std::log(u01()) / theta;
    }
    return std::log(gamma_variate(theta));
  }

 private:
  uint64_t s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace polymerlab
