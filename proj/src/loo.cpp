#include "bayescancel/loo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"

namespace bayescancel::loo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHighK = 0.7;

}  // namespace

GpdFit fit_generalized_pareto(std::span<const double> exceedances_sorted) {
  const std::size_t n = exceedances_sorted.size();
  if (n < 5) throw SizeError("fit_generalized_pareto: need at least 5 points");
  const double x_max = exceedances_sorted[n - 1];
  const std::size_t quart = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) / 4.0 + 0.5));
  const double x_star = exceedances_sorted[quart - 1];
  if (!(x_star > 0.0) || !(x_max > 0.0)) {
    throw DataError("fit_generalized_pareto: exceedances must be positive");
  }

  const std::size_t grid = 30 + static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  std::vector<double> theta(grid);
  std::vector<double> profile(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double jj = static_cast<double>(j) + 1.0;
    theta[j] = 1.0 / x_max +
               (1.0 - std::sqrt(static_cast<double>(grid) / (jj - 0.5))) /
                   (3.0 * x_star);
    double mean_log1p = 0.0;
    for (double x : exceedances_sorted) mean_log1p += std::log1p(-theta[j] * x);
    mean_log1p /= static_cast<double>(n);
    profile[j] = static_cast<double>(n) *
                 (std::log(-theta[j] / mean_log1p) - mean_log1p - 1.0);
  }

  // normalized profile-likelihood weights
  double theta_hat = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    double denom = 0.0;
    for (std::size_t l = 0; l < grid; ++l) denom += std::exp(profile[l] - profile[j]);
    theta_hat += theta[j] / denom;
  }

  double k = 0.0;
  for (double x : exceedances_sorted) k += std::log1p(-theta_hat * x);
  k /= static_cast<double>(n);
  GpdFit fit;
  fit.sigma = -k / theta_hat;
  // weakly informative prior: shrink k toward 0.5 with weight 10
  fit.k = k * static_cast<double>(n) / (static_cast<double>(n) + 10.0) +
          5.0 / (static_cast<double>(n) + 10.0);
  return fit;
}

double gpd_quantile(double p, double k, double sigma) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("gpd_quantile: p must lie in [0, 1)");
  if (std::abs(k) < 1e-12) return -sigma * std::log1p(-p);
  return sigma * std::expm1(-k * std::log1p(-p)) / k;
}

std::vector<double> PsisResult::weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i]);
  return w;
}

PsisResult psis_smooth(std::span<const double> log_ratios) {
  const std::size_t s = log_ratios.size();
  if (s == 0) throw SizeError("psis_smooth: empty input");
  for (double r : log_ratios) {
    if (std::isnan(r) || r == std::numeric_limits<double>::infinity()) {
      throw DataError("psis_smooth: log ratios must be finite");
    }
  }

  PsisResult result;
  const double max_lr = *std::max_element(log_ratios.begin(), log_ratios.end());
  result.log_weights.resize(s);
  for (std::size_t i = 0; i < s; ++i) result.log_weights[i] = log_ratios[i] - max_lr;

  const double min_lr = *std::min_element(log_ratios.begin(), log_ratios.end());
  if (max_lr - min_lr < 1e-13) {
    // zero-variance ratios: uniform weights, no defined tail shape
    result.k_hat = kNegInf;
    const double log_s = std::log(static_cast<double>(s));
    for (double& lw : result.log_weights) lw = -log_s;
    return result;
  }

  if (s < 25) {
    // truncated importance sampling: cap at sqrt(S) times the mean weight
    result.truncated_fallback = true;
    result.k_hat = std::numeric_limits<double>::quiet_NaN();
    const double log_mean =
        math::log_sum_exp(result.log_weights) - std::log(static_cast<double>(s));
    const double cap = log_mean + 0.5 * std::log(static_cast<double>(s));
    for (double& lw : result.log_weights) lw = std::min(lw, cap);
  } else {
    const std::size_t tail_len = static_cast<std::size_t>(std::ceil(
        std::min(0.2 * static_cast<double>(s),
                 3.0 * std::sqrt(static_cast<double>(s)))));
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return result.log_weights[a] < result.log_weights[b];
    });
    const double log_cutoff = result.log_weights[order[s - tail_len - 1]];
    const double cutoff = std::exp(log_cutoff);

    std::vector<double> exceedances(tail_len);
    bool positive = true;
    for (std::size_t j = 0; j < tail_len; ++j) {
      exceedances[j] =
          std::exp(result.log_weights[order[s - tail_len + j]]) - cutoff;
      if (!(exceedances[j] >= 0.0)) positive = false;
    }
    const std::size_t quart = static_cast<std::size_t>(
        std::floor(static_cast<double>(tail_len) / 4.0 + 0.5));
    if (!positive || !(exceedances[quart - 1] > 0.0) ||
        !(exceedances[tail_len - 1] > 0.0)) {
      // too many ties at the cutoff for a tail fit; keep raw weights
      result.k_hat = std::numeric_limits<double>::quiet_NaN();
    } else {
      const GpdFit fit = fit_generalized_pareto(exceedances);
      result.k_hat = fit.k;
      if (std::isfinite(fit.k) && fit.sigma > 0.0) {
        // replace tail ratios by expected order statistics of the fit,
        // truncated at the raw maximum (zero on the shifted log scale)
        for (std::size_t j = 0; j < tail_len; ++j) {
          const double p =
              (static_cast<double>(j) + 0.5) / static_cast<double>(tail_len);
          const double smoothed = cutoff + gpd_quantile(p, fit.k, fit.sigma);
          result.log_weights[order[s - tail_len + j]] =
              std::min(std::log(smoothed), 0.0);
        }
      }
    }
  }

  const double log_norm = math::log_sum_exp(result.log_weights);
  for (double& lw : result.log_weights) lw -= log_norm;
  return result;
}

LooResult elpd_loo(const model::LogLikMatrix& loglik) {
  if (loglik.n_obs == 0 || loglik.n_draws == 0) {
    throw SizeError("elpd_loo: empty log-likelihood matrix");
  }
  for (double v : loglik.values) {
    if (!std::isfinite(v)) throw DataError("elpd_loo: non-finite log likelihood");
  }

  LooResult result;
  result.pointwise_elpd.resize(loglik.n_obs);
  result.pareto_k.resize(loglik.n_obs);
  bool any_fallback = false;
  std::vector<double> log_ratios(loglik.n_draws);
  std::vector<double> summands(loglik.n_draws);
  for (std::size_t i = 0; i < loglik.n_obs; ++i) {
    const auto row = loglik.obs_row(i);
    for (std::size_t s = 0; s < loglik.n_draws; ++s) log_ratios[s] = -row[s];
    const PsisResult psis = psis_smooth(log_ratios);
    any_fallback = any_fallback || psis.truncated_fallback;
    for (std::size_t s = 0; s < loglik.n_draws; ++s) {
      summands[s] = psis.log_weights[s] + row[s];
    }
    result.pointwise_elpd[i] = math::log_sum_exp(summands);
    result.pareto_k[i] = psis.k_hat;
    if (std::isfinite(psis.k_hat) && psis.k_hat > kHighK) ++result.n_high_k;
  }
  result.elpd_loo = math::pairwise_sum(result.pointwise_elpd);
  result.se_elpd = std::sqrt(static_cast<double>(loglik.n_obs) *
                             math::sample_variance(result.pointwise_elpd));
  if (result.n_high_k > 0) {
    result.warnings.push_back(std::to_string(result.n_high_k) +
                              " observations with Pareto k above 0.7; their "
                              "elpd contributions may be unstable");
  }
  if (any_fallback) {
    result.warnings.push_back(
        "fewer than 25 draws: truncated importance sampling used instead of PSIS");
  }
  return result;
}

CompareResult compare(
    const std::vector<std::pair<std::string, LooResult>>& results) {
  if (results.size() < 2) throw SizeError("compare: need at least two models");
  const std::size_t n = results.front().second.pointwise_elpd.size();
  for (const auto& [name, res] : results) {
    if (res.pointwise_elpd.size() != n) {
      throw CompareError("model '" + name +
                         "' was evaluated on a different observation set");
    }
  }

  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].second.elpd_loo > results[b].second.elpd_loo;
  });

  const LooResult& best = results[order[0]].second;
  CompareResult cmp;
  for (std::size_t idx : order) {
    const auto& [name, res] = results[idx];
    CompareRow row;
    row.name = name;
    row.elpd_loo = res.elpd_loo;
    row.se_elpd = res.se_elpd;
    if (idx == order[0]) {
      row.elpd_diff = 0.0;
      row.se_diff = 0.0;
    } else {
      std::vector<double> diff(n);
      for (std::size_t i = 0; i < n; ++i) {
        diff[i] = res.pointwise_elpd[i] - best.pointwise_elpd[i];
      }
      row.elpd_diff = math::pairwise_sum(diff);
      row.se_diff =
          std::sqrt(static_cast<double>(n) * math::sample_variance(diff));
    }
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

}  // namespace bayescancel::loo
