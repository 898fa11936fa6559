#pragma once

// Seeding and sampling. Every random quantity in the library flows through
// Rng so that a (seed, call order) pair pins down a run exactly. The
// distributions are implemented explicitly instead of via std::*_distribution
// because the standard leaves those algorithms unspecified; with the fixed
// mt19937_64 engine this makes draws -- and therefore trace files -- identical
// across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace cumgain {

// SplitMix64 finalizer (public-domain reference constants).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-run seed for run `index` under `master_seed`: the index-th output of the
// SplitMix64 stream started at `master_seed`, evaluated in closed form. Pure
// 64-bit integer arithmetic, so seed lists reproduce on any platform.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Successes in n Bernoulli(p) trials, sampled exactly. O(n), which is cheap
  // at the day-batch sizes this library deals in.
  std::int64_t binomial(std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial: negative trial count");
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::int64_t successes = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (bernoulli(p)) ++successes;
    }
    return successes;
  }

  // Standard normal, Marsaglia polar method.
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Gamma(shape, 1), Marsaglia & Tsang squeeze method; shapes below one use
  // the usual boost Gamma(a) = Gamma(a + 1) * U^(1/a).
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      return gamma(shape + 1.0) * std::pow(uniform01(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    const double s = x + y;
    return s > 0.0 ? x / s : 0.5;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cumgain
