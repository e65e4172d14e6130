#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace chern {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Counter-based uniform in [0,1): a pure function of (seed, a, b, c), so
/// sampled values are reproducible across platforms and independent of call
/// order.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= (a + 1) * 0x9e3779b97f4a7c15ULL;
  (void)splitmix64(s);
  s ^= (b + 1) * 0xc2b2ae3d27d4eb4fULL;
  (void)splitmix64(s);
  s ^= (c + 1) * 0x165667b19e3779f9ULL;
  return u64_to_unit(splitmix64(s));
}

/// Sequential deterministic generator for tests and optimizer restarts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x5851f42d4c957f2dULL) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  double uniform() { return u64_to_unit(next_u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::complex<double> gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chern
