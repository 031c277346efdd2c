#ifndef BAYESCANCEL_RNG_HPP
#define BAYESCANCEL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "bayescancel/errors.hpp"

namespace bayescancel {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. All variate generators are implemented here rather
/// than via <random> distributions, whose output is implementation-defined;
/// the draws must be bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Stream for one chain, a pure function of (seed, chain index).
  static Rng for_chain(std::uint64_t seed, int chain) {
    return Rng(splitmix64(seed) ^ splitmix64(0x9d2c5680a76f31e5ULL + static_cast<std::uint64_t>(chain) + 1));
  }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). Rejection keeps the draw exactly uniform.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw SizeError("uniform_int: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential() { return -std::log1p(-uniform()); }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  long binomial(long n, double p) {
    long k = 0;
    for (long i = 0; i < n; ++i) k += bernoulli(p);
    return k;
  }

  /// Gamma(shape, rate) via Marsaglia-Tsang. Requires shape >= 1; use
  /// log_gamma_draw for small shapes, where the value underflows.
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0, 1.0);
      return g * std::pow(uniform_open(), 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v / rate;
      }
    }
  }

  /// ln of a Gamma(shape, rate) draw, stable for shapes far below 1 where the
  /// draw itself is not representable in double.
  double log_gamma_draw(double shape, double rate) {
    if (shape >= 1.0) return std::log(gamma(shape, rate));
    const double g = gamma(shape + 1.0, 1.0);
    return std::log(g) + std::log(uniform_open()) / shape - std::log(rate);
  }

  /// Beta(a, b) computed through log-gamma draws; safe for tiny a, b.
  double beta(double a, double b) {
    const double lx = log_gamma_draw(a, 1.0);
    const double ly = log_gamma_draw(b, 1.0);
    return 1.0 / (1.0 + std::exp(ly - lx));
  }

 private:
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bayescancel

#endif
