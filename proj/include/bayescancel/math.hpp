#ifndef BAYESCANCEL_MATH_HPP
#define BAYESCANCEL_MATH_HPP

#include <span>
#include <vector>

namespace bayescancel::math {

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 coefficients)
/// with reflection below 0.5. Throws DomainError for x <= 0.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0. Recurrence shift to x >= 6 followed
/// by the asymptotic series.
double digamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b); a, b > 0.
double log_beta(double a, double b);

/// ln of the binomial coefficient C(n, k) for integer 0 <= k <= n.
double log_choose(double n, double k);

/// 1 / (1 + exp(-z)), overflow-free for any finite z.
double sigmoid(double z);

/// ln sigmoid(z) = -log1p(exp(-z)), computed stably on both tails.
double log_sigmoid(double z);

/// ln(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// ln sum_i exp(v_i); the max is subtracted before exponentiating.
/// Throws SizeError on empty input.
double log_sum_exp(std::span<const double> values);

/// Pairwise (tree) summation; order-stable sums for reproducibility checks.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Sample variance with divisor n - 1.
double sample_variance(std::span<const double> values);

/// Quantile of sorted data by linear interpolation of order statistics at
/// position p * (n - 1) + 1 (one-based).
double quantile_sorted(std::span<const double> sorted, double p);

/// Quantile of unsorted data; sorts a copy and applies quantile_sorted.
double quantile(std::span<const double> values, double p);

/// Inverse of the weighted empirical CDF with linear interpolation between
/// cumulative-weight midpoints. Weights must be nonnegative with positive sum.
double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q);

/// ln N(x | mean, sd), normalizing constant included.
double normal_log_pdf(double x, double mean, double sd);

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation refined by
/// one Halley step); |error| below 1e-14 over (0, 1).
double inv_std_normal_cdf(double p);

}  // namespace bayescancel::math

#endif
