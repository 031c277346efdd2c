#ifndef BAYESCANCEL_LOO_HPP
#define BAYESCANCEL_LOO_HPP

#include <span>
#include <string>
#include <vector>

#include "bayescancel/model.hpp"

namespace bayescancel::loo {

struct GpdFit {
  double k = 0.0;     // shape
  double sigma = 0.0; // scale
};

/// Zhang-Stephens profile-likelihood quantile fit (weakly informative prior
/// adjustment on k) over exceedances sorted ascending.
GpdFit fit_generalized_pareto(std::span<const double> exceedances_sorted);

/// Quantile of the GPD with location 0.
double gpd_quantile(double p, double k, double sigma);

struct PsisResult {
  std::vector<double> log_weights;  // normalized: logsumexp == 0
  double k_hat = 0.0;
  bool truncated_fallback = false;  // S < 25: truncated importance sampling

  std::vector<double> weights() const;
};

/// Pareto-smoothed importance weights: fits a GPD to the
/// min(0.2 S, 3 sqrt(S)) largest ratios, replaces them by expected order
/// statistics of the fit, truncates at the raw maximum, normalizes.
PsisResult psis_smooth(std::span<const double> log_ratios);

struct LooResult {
  double elpd_loo = 0.0;
  double se_elpd = 0.0;
  std::vector<double> pointwise_elpd;
  std::vector<double> pareto_k;
  std::size_t n_high_k = 0;  // k_hat > 0.7
  std::vector<std::string> warnings;
};

/// PSIS-LOO over an N x S pointwise log-likelihood matrix.
LooResult elpd_loo(const model::LogLikMatrix& loglik);

struct CompareRow {
  std::string name;
  double elpd_loo = 0.0;
  double se_elpd = 0.0;
  double elpd_diff = 0.0;
  double se_diff = 0.0;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // sorted best-first
};

/// Pairwise comparison against the best model; the best row is (0, 0) and
/// se_diff is the paired standard error over pointwise differences.
CompareResult compare(
    const std::vector<std::pair<std::string, LooResult>>& results);

}  // namespace bayescancel::loo

#endif
