#include "bayescancel/math.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "bayescancel/errors.hpp"

namespace bayescancel::math {

namespace {

// Lanczos g = 7, 9 coefficients.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)

double lanczos_log_gamma(double x) {
  // valid for x >= 0.5
  double acc = kLanczos[0];
  for (int k = 1; k < 9; ++k) acc += kLanczos[k] / (x - 1.0 + k);
  const double t = x + kLanczosG - 0.5;
  return kHalfLog2Pi + (x - 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // asymptotic series in 1/x^2, terms through x^-14
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 +
                    inv2 * (-1.0 / 120.0 +
                            inv2 * (1.0 / 252.0 +
                                    inv2 * (-1.0 / 240.0 +
                                            inv2 * (1.0 / 132.0 +
                                                    inv2 * (-691.0 / 32760.0 +
                                                            inv2 / 12.0))))));
  return acc + series;
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("log_beta: arguments must be positive");
  }
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_choose(double n, double k) {
  if (k < 0.0 || k > n) throw DomainError("log_choose: require 0 <= k <= n");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw SizeError("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 16) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw SizeError("mean: empty input");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - m) * (values[i] - m);
  return pairwise_sum(sq) / static_cast<double>(n - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw SizeError("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> values, double p) {
  std::vector<double> copy(values.begin(), values.end());
  std::sort(copy.begin(), copy.end());
  return quantile_sorted(copy, p);
}

double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q) {
  if (values.empty()) throw SizeError("weighted_quantile: empty input");
  if (values.size() != weights.size()) {
    throw ShapeError("weighted_quantile: values and weights differ in length");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("weighted_quantile: q must lie in [0, 1]");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("weighted_quantile: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("weighted_quantile: weights sum to zero");

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // cumulative-weight midpoints: p_k = (C_k - w_k / 2) / W
  double cum = 0.0;
  double prev_p = 0.0;
  double prev_x = values[order[0]];
  bool first = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double w = weights[order[k]];
    if (w == 0.0) continue;
    const double x = values[order[k]];
    const double pk = (cum + 0.5 * w) / total;
    cum += w;
    if (first) {
      if (q <= pk) return x;
      first = false;
    } else if (q <= pk) {
      const double t = (q - prev_p) / (pk - prev_p);
      return prev_x + t * (x - prev_x);
    }
    prev_p = pk;
    prev_x = x;
  }
  return prev_x;
}

double normal_log_pdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("normal_log_pdf: sd must be positive");
  const double z = (x - mean) / sd;
  return -kHalfLog2Pi - std::log(sd) - 0.5 * z * z;
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double inv_std_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("inv_std_normal_cdf: p must lie in (0, 1)");
  }
  // Acklam's rational approximation
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement against erfc
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace bayescancel::math
