#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"
#include "bayescancel/rng.hpp"
#include "test_util.hpp"

using namespace bayescancel;
namespace m = bayescancel::math;

namespace {
constexpr double kEulerMascheroni = 0.57721566490153286061;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace

TEST_CASE("log_gamma closed forms") {
  CHECK(m::log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m::log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m::log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(m::log_gamma(0.5) ==
        doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-13));
  CHECK_THROWS_AS(m::log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(m::log_gamma(-1.5), DomainError);
}

TEST_CASE("log_gamma tracks the std oracle across the domain") {
  for (double x : {1e-6, 1e-4, 0.1, 0.3, 0.9, 1.5, 2.0, 3.7, 10.0, 123.4,
                   1e4, 1e6, 1e8}) {
    CHECK_MESSAGE(close_rel(m::log_gamma(x), std::lgamma(x), 1e-12),
                  "x = " << x);
  }
}

TEST_CASE("digamma reference values and recurrence") {
  CHECK(m::digamma(1.0) == doctest::Approx(-kEulerMascheroni).epsilon(1e-13));
  CHECK(m::digamma(2.0) ==
        doctest::Approx(1.0 - kEulerMascheroni).epsilon(1e-13));
  CHECK_THROWS_AS(m::digamma(0.0), DomainError);

  // finite differences of log_gamma
  const double x = 3.0, h = 1e-5;
  const double fd = (m::log_gamma(x + h) - m::log_gamma(x - h)) / (2.0 * h);
  CHECK(std::abs(m::digamma(x) - fd) < 1e-6);

  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double z = rng.uniform(0.01, 100.0);
    const double lhs = m::digamma(z + 1.0) - m::digamma(z);
    CHECK_MESSAGE(close_rel(lhs, 1.0 / z, 1e-10), "z = " << z);
  }
}

TEST_CASE("log_beta closed forms, symmetry and quadrature oracle") {
  CHECK(m::log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m::log_beta(2.0, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(m::log_beta(3.5, 2.25) == m::log_beta(2.25, 3.5));
  CHECK_THROWS_AS(m::log_beta(0.0, 1.0), DomainError);

  const double integral = testutil::adaptive_simpson(
      [](double t) { return std::pow(t, 2.5) * std::pow(1.0 - t, 1.25); }, 0.0,
      1.0, 1e-14);
  CHECK(m::log_beta(3.5, 2.25) ==
        doctest::Approx(std::log(integral)).epsilon(1e-10));
}

TEST_CASE("sigmoid stability and symmetry") {
  CHECK(m::sigmoid(0.0) == 0.5);
  CHECK(m::sigmoid(4.16) == doctest::Approx(0.9846322944347244).epsilon(1e-12));
  CHECK(m::log_sigmoid(-745.0) == doctest::Approx(-745.0).epsilon(1e-12));
  CHECK(std::isfinite(m::log_sigmoid(-745.0)));
  CHECK(m::sigmoid(700.0) == doctest::Approx(1.0));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double z = rng.uniform(-40.0, 40.0);
    CHECK(std::abs(m::sigmoid(z) + m::sigmoid(-z) - 1.0) <= 1e-15);
  }
}

TEST_CASE("log_sum_exp shift invariance") {
  const std::vector<double> two_zero = {0.0, 0.0};
  CHECK(m::log_sum_exp(two_zero) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<double> tiny = {-1000.0, -1000.0};
  CHECK(m::log_sum_exp(tiny) ==
        doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(m::log_sum_exp(std::span<const double>()), SizeError);

  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(20);
    for (double& x : v) x = rng.uniform(-5.0, 5.0);
    const double c = rng.uniform(-300.0, 300.0);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += c;
    CHECK(m::log_sum_exp(shifted) ==
          doctest::Approx(m::log_sum_exp(v) + c).epsilon(1e-12));
  }
}

TEST_CASE("weighted_quantile median and interpolation") {
  const std::vector<double> values = {1.0, 2.0, 3.0};
  const std::vector<double> weights = {1.0, 1.0, 1.0};
  CHECK(m::weighted_quantile(values, weights, 0.5) == doctest::Approx(2.0));
  CHECK(m::weighted_quantile(values, weights, 0.0) == doctest::Approx(1.0));
  CHECK(m::weighted_quantile(values, weights, 1.0) == doctest::Approx(3.0));
  const std::vector<double> heavy = {0.0, 0.0, 1.0};
  CHECK(m::weighted_quantile(values, heavy, 0.5) == doctest::Approx(3.0));
  CHECK_THROWS_AS(
      m::weighted_quantile(std::span<const double>(), std::span<const double>(), 0.5),
      SizeError);
}

TEST_CASE("quantile linear interpolation rule") {
  std::vector<double> seq(4000);
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<double>(i + 1);
  CHECK(m::quantile(seq, 0.025) == doctest::Approx(100.975).epsilon(1e-12));
  CHECK(m::quantile(seq, 0.975) == doctest::Approx(3900.025).epsilon(1e-12));
  CHECK(m::quantile(seq, 0.0) == 1.0);
  CHECK(m::quantile(seq, 1.0) == 4000.0);
}

TEST_CASE("pairwise_sum matches plain summation") {
  Rng rng(5);
  std::vector<double> v(10001);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(m::pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("inverse normal CDF round trip") {
  for (double p : {1e-12, 1e-6, 0.01, 0.31, 0.5, 0.77, 0.99, 1.0 - 1e-9}) {
    const double x = m::inv_std_normal_cdf(p);
    CHECK(m::std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-11));
  }
  CHECK(m::inv_std_normal_cdf(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(m::inv_std_normal_cdf(0.0), DomainError);
}

TEST_CASE("normal_log_pdf at the mode") {
  CHECK(m::normal_log_pdf(3.5, 3.5, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
  // one sigma away drops the density by exactly 0.5
  CHECK(m::normal_log_pdf(0.5, 0.0, 0.5) - m::normal_log_pdf(0.0, 0.0, 0.5) ==
        doctest::Approx(-0.5).epsilon(1e-14));
}
