#ifndef BAYESCANCEL_MODEL_HPP
#define BAYESCANCEL_MODEL_HPP

#include <span>
#include <string>
#include <vector>

#include "bayescancel/ingest.hpp"

namespace bayescancel::model {

enum class Family { bernoulli_logit, beta_binomial_logit };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// Gaussian priors on the intercept and slopes; gamma prior on the
/// Beta-Binomial precision phi (applied on the positive scale, sampled as
/// log_phi with the Jacobian folded in).
/// The phi default is gamma(2, 0.1): vague (mean 20) but smooth on the
/// log_phi sampling scale. Sharper-at-zero choices such as gamma(0.01, 0.01)
/// give log_phi a hundred-sigma flat ramp against a hard wall, which a
/// diagonal-mass integrator cannot traverse without mass divergences.
struct PriorSpec {
  double intercept_mean = 0.0;
  double intercept_sd = 1.0;
  double slope_mean = 0.0;
  double slope_sd = 1.0;
  double phi_shape = 2.0;
  double phi_rate = 0.1;

  static PriorSpec logistic_defaults() { return {3.5, 1.0, 0.0, 0.5, 2.0, 0.1}; }
  static PriorSpec beta_binomial_defaults() { return {0.0, 5.0, 0.0, 2.0, 2.0, 0.1}; }

  void validate() const;
};

/// Parameter layout on the unconstrained scale:
///   theta[0]              intercept
///   theta[1 .. P-1]       slopes, one per non-intercept design column
///   theta[P]              log_phi (beta_binomial_logit only)
struct ModelSpec {
  Family family = Family::bernoulli_logit;
  PriorSpec priors;
  std::size_t n_coef = 0;  // P, including the intercept column

  std::size_t dim() const {
    return family == Family::beta_binomial_logit ? n_coef + 1 : n_coef;
  }
  std::vector<std::string> param_names(const ingest::DesignMatrix& dm) const;

  static ModelSpec for_design(Family family, const ingest::DesignMatrix& dm);
};

double log_prior(const ModelSpec& spec, std::span<const double> theta);

/// Sum_i [ y_i log sigmoid(eta_i) + (1 - y_i) log sigmoid(-eta_i) ].
/// Requires trials == 1 on every row.
double log_lik_bernoulli(const ingest::DesignMatrix& dm,
                         std::span<const double> theta);

/// Beta-Binomial log likelihood under the mean-precision link
/// alpha = mu * phi, beta = (1 - mu) * phi, logit(mu) = X beta.
double log_lik_beta_binomial(const ingest::DesignMatrix& dm,
                             std::span<const double> theta);

double log_lik(const ModelSpec& spec, const ingest::DesignMatrix& dm,
               std::span<const double> theta);

double log_posterior(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                     std::span<const double> theta);

/// Analytic gradient of the log posterior; returns the log posterior value.
double log_posterior_grad(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                          std::span<const double> theta,
                          std::span<double> grad);

/// Per-observation log density of one draw, written into out[0..N).
/// For the Bernoulli family on rows with trials > 1 this is the binomial
/// count density, which reduces exactly to the Bernoulli density at n = 1;
/// grouped data can then be scored against either family.
void pointwise_log_lik_draw(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                            std::span<const double> theta, std::span<double> out);

/// N x S matrix of per-observation log likelihoods, one column per draw.
struct LogLikMatrix {
  std::size_t n_obs = 0;
  std::size_t n_draws = 0;
  std::vector<double> values;  // row-major, n_obs * n_draws

  double at(std::size_t i, std::size_t s) const { return values[i * n_draws + s]; }
  std::span<const double> obs_row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * n_draws, n_draws);
  }
};

/// draws holds n_draws stacked parameter vectors of length spec.dim().
LogLikMatrix pointwise_log_lik(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                               std::span<const double> draws, std::size_t n_draws);

/// Beta-Binomial log PMF for a single observation (exposed for tests).
double beta_binomial_log_pmf(long y, long n, double mu, double phi);

}  // namespace bayescancel::model

#endif
