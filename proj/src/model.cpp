#include "bayescancel/model.hpp"

#include <cmath>

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"

namespace bayescancel::model {

using math::digamma;
using math::log_beta;
using math::log_choose;
using math::log_sigmoid;
using math::pairwise_sum;
using math::sigmoid;

std::string family_name(Family family) {
  return family == Family::bernoulli_logit ? "bernoulli_logit"
                                           : "beta_binomial_logit";
}

Family family_from_name(const std::string& name) {
  if (name == "bernoulli_logit" || name == "logistic") {
    return Family::bernoulli_logit;
  }
  if (name == "beta_binomial_logit" || name == "beta-binomial" ||
      name == "beta_binomial") {
    return Family::beta_binomial_logit;
  }
  throw ConfigError("unknown model family: " + name);
}

void PriorSpec::validate() const {
  if (!(intercept_sd > 0.0) || !(slope_sd > 0.0)) {
    throw ConfigError("prior standard deviations must be positive");
  }
  if (!(phi_shape > 0.0) || !(phi_rate > 0.0)) {
    throw ConfigError("phi prior shape and rate must be positive");
  }
}

std::vector<std::string> ModelSpec::param_names(const ingest::DesignMatrix& dm) const {
  if (dm.n_cols != n_coef) throw ShapeError("design matrix does not match spec");
  std::vector<std::string> names = dm.column_names;
  if (family == Family::beta_binomial_logit) names.push_back("log_phi");
  return names;
}

ModelSpec ModelSpec::for_design(Family family, const ingest::DesignMatrix& dm) {
  ModelSpec spec;
  spec.family = family;
  spec.priors = family == Family::bernoulli_logit
                    ? PriorSpec::logistic_defaults()
                    : PriorSpec::beta_binomial_defaults();
  spec.n_coef = dm.n_cols;
  return spec;
}

namespace {

void check_theta(const ModelSpec& spec, std::span<const double> theta) {
  if (theta.size() != spec.dim()) {
    throw ShapeError("parameter vector has dimension " +
                     std::to_string(theta.size()) + ", spec requires " +
                     std::to_string(spec.dim()));
  }
}

double linear_predictor(const ingest::DesignMatrix& dm, std::size_t i,
                        std::span<const double> theta) {
  const double* row = dm.x.data() + i * dm.n_cols;
  double eta = 0.0;
  for (std::size_t j = 0; j < dm.n_cols; ++j) eta += row[j] * theta[j];
  return eta;
}

}  // namespace

double log_prior(const ModelSpec& spec, std::span<const double> theta) {
  check_theta(spec, theta);
  const PriorSpec& pr = spec.priors;
  double lp = math::normal_log_pdf(theta[0], pr.intercept_mean, pr.intercept_sd);
  for (std::size_t j = 1; j < spec.n_coef; ++j) {
    lp += math::normal_log_pdf(theta[j], pr.slope_mean, pr.slope_sd);
  }
  if (spec.family == Family::beta_binomial_logit) {
    // gamma(shape, rate) on phi plus the log-Jacobian of phi = exp(log_phi);
    // the (shape - 1) log phi term and the Jacobian combine to shape * log_phi
    const double log_phi = theta[spec.n_coef];
    lp += pr.phi_shape * std::log(pr.phi_rate) - math::log_gamma(pr.phi_shape) +
          pr.phi_shape * log_phi - pr.phi_rate * std::exp(log_phi);
  }
  return lp;
}

double log_lik_bernoulli(const ingest::DesignMatrix& dm,
                         std::span<const double> theta) {
  if (theta.size() != dm.n_cols) {
    throw ShapeError("log_lik_bernoulli: parameter dimension mismatch");
  }
  std::vector<double> terms(dm.n_rows);
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    if (dm.trials[i] != 1) {
      throw DataError("log_lik_bernoulli: row " + std::to_string(i + 1) +
                      " has trials != 1; use the beta-binomial family");
    }
    const double eta = linear_predictor(dm, i, theta);
    terms[i] = dm.y[i] == 1 ? log_sigmoid(eta) : log_sigmoid(-eta);
  }
  return pairwise_sum(terms);
}

double beta_binomial_log_pmf(long y, long n, double mu, double phi) {
  if (y < 0 || y > n) throw DataError("beta_binomial_log_pmf: require 0 <= y <= n");
  const double a = mu * phi;
  const double b = (1.0 - mu) * phi;
  return log_choose(static_cast<double>(n), static_cast<double>(y)) +
         log_beta(static_cast<double>(y) + a, static_cast<double>(n - y) + b) -
         log_beta(a, b);
}

double log_lik_beta_binomial(const ingest::DesignMatrix& dm,
                             std::span<const double> theta) {
  if (theta.size() != dm.n_cols + 1) {
    throw ShapeError("log_lik_beta_binomial: parameter dimension mismatch");
  }
  const double phi = std::exp(theta[dm.n_cols]);
  std::vector<double> terms(dm.n_rows);
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    const long n = dm.trials[i];
    const long y = dm.y[i];
    if (y < 0 || y > n) {
      throw DataError("row " + std::to_string(i + 1) + ": y must lie in [0, trials]");
    }
    const double mu = sigmoid(linear_predictor(dm, i, theta.first(dm.n_cols)));
    terms[i] = beta_binomial_log_pmf(y, n, mu, phi);
  }
  return pairwise_sum(terms);
}

double log_lik(const ModelSpec& spec, const ingest::DesignMatrix& dm,
               std::span<const double> theta) {
  check_theta(spec, theta);
  if (dm.n_cols != spec.n_coef) throw ShapeError("design matrix does not match spec");
  return spec.family == Family::bernoulli_logit
             ? log_lik_bernoulli(dm, theta)
             : log_lik_beta_binomial(dm, theta);
}

double log_posterior(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                     std::span<const double> theta) {
  return log_prior(spec, theta) + log_lik(spec, dm, theta);
}

double log_posterior_grad(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                          std::span<const double> theta, std::span<double> grad) {
  check_theta(spec, theta);
  if (grad.size() != spec.dim()) throw ShapeError("gradient buffer has wrong size");
  if (dm.n_cols != spec.n_coef) throw ShapeError("design matrix does not match spec");
  const PriorSpec& pr = spec.priors;

  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = 0.0;
  grad[0] = -(theta[0] - pr.intercept_mean) / (pr.intercept_sd * pr.intercept_sd);
  for (std::size_t j = 1; j < spec.n_coef; ++j) {
    grad[j] = -(theta[j] - pr.slope_mean) / (pr.slope_sd * pr.slope_sd);
  }

  std::vector<double> terms(dm.n_rows);
  if (spec.family == Family::bernoulli_logit) {
    for (std::size_t i = 0; i < dm.n_rows; ++i) {
      if (dm.trials[i] != 1) {
        throw DataError("log_lik_bernoulli: row " + std::to_string(i + 1) +
                        " has trials != 1; use the beta-binomial family");
      }
      const double eta = linear_predictor(dm, i, theta);
      // one exp and one log1p cover mu and both log-sigmoid branches
      const double t = std::exp(-std::abs(eta));
      const double l1p = std::log1p(t);
      const double mu = eta >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
      if (dm.y[i] == 1) {
        terms[i] = eta >= 0.0 ? -l1p : eta - l1p;
      } else {
        terms[i] = eta >= 0.0 ? -eta - l1p : -l1p;
      }
      const double resid = static_cast<double>(dm.y[i]) - mu;
      const double* row = dm.x.data() + i * dm.n_cols;
      for (std::size_t j = 0; j < dm.n_cols; ++j) grad[j] += row[j] * resid;
    }
    return log_prior(spec, theta) + pairwise_sum(terms);
  }

  // beta-binomial: chain rule through mu and phi via digamma differences
  const double log_phi = theta[spec.n_coef];
  const double phi = std::exp(log_phi);
  double dlp_dlogphi = pr.phi_shape - pr.phi_rate * phi;  // prior + Jacobian
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    const long n = dm.trials[i];
    const long y = dm.y[i];
    if (y < 0 || y > n) {
      throw DataError("row " + std::to_string(i + 1) + ": y must lie in [0, trials]");
    }
    const double eta = linear_predictor(dm, i, theta.first(dm.n_cols));
    const double mu = sigmoid(eta);
    const double a = mu * phi;
    const double b = (1.0 - mu) * phi;
    const double da = digamma(static_cast<double>(y) + a) - digamma(a);
    const double db = digamma(static_cast<double>(n - y) + b) - digamma(b);
    const double dl_dmu = phi * (da - db);
    const double dmu_deta = mu * (1.0 - mu);
    const double* row = dm.x.data() + i * dm.n_cols;
    for (std::size_t j = 0; j < dm.n_cols; ++j) {
      grad[j] += row[j] * dl_dmu * dmu_deta;
    }
    const double dl_dphi = mu * da + (1.0 - mu) * db + digamma(phi) -
                           digamma(static_cast<double>(n) + phi);
    dlp_dlogphi += phi * dl_dphi;
    terms[i] = beta_binomial_log_pmf(y, n, mu, phi);
  }
  grad[spec.n_coef] = dlp_dlogphi;
  return log_prior(spec, theta) + pairwise_sum(terms);
}

void pointwise_log_lik_draw(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                            std::span<const double> theta, std::span<double> out) {
  check_theta(spec, theta);
  if (out.size() != dm.n_rows) throw ShapeError("pointwise output buffer has wrong size");
  if (spec.family == Family::bernoulli_logit) {
    for (std::size_t i = 0; i < dm.n_rows; ++i) {
      const long n = dm.trials[i];
      const long y = dm.y[i];
      const double eta = linear_predictor(dm, i, theta);
      if (n == 1) {
        out[i] = y == 1 ? log_sigmoid(eta) : log_sigmoid(-eta);
      } else {
        // binomial count density; log C(1, y) = 0 keeps n = 1 exact
        out[i] = log_choose(static_cast<double>(n), static_cast<double>(y)) +
                 static_cast<double>(y) * log_sigmoid(eta) +
                 static_cast<double>(n - y) * log_sigmoid(-eta);
      }
    }
    return;
  }
  const double phi = std::exp(theta[spec.n_coef]);
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    const double mu = sigmoid(linear_predictor(dm, i, theta.first(dm.n_cols)));
    out[i] = beta_binomial_log_pmf(dm.y[i], dm.trials[i], mu, phi);
  }
}

LogLikMatrix pointwise_log_lik(const ModelSpec& spec, const ingest::DesignMatrix& dm,
                               std::span<const double> draws, std::size_t n_draws) {
  const std::size_t dim = spec.dim();
  if (draws.size() != n_draws * dim) {
    throw ShapeError("pointwise_log_lik: draws buffer does not match spec dimension");
  }
  LogLikMatrix ll;
  ll.n_obs = dm.n_rows;
  ll.n_draws = n_draws;
  ll.values.resize(ll.n_obs * ll.n_draws);
  std::vector<double> col(dm.n_rows);
  for (std::size_t s = 0; s < n_draws; ++s) {
    pointwise_log_lik_draw(spec, dm, draws.subspan(s * dim, dim), col);
    for (std::size_t i = 0; i < dm.n_rows; ++i) ll.values[i * n_draws + s] = col[i];
  }
  return ll;
}

}  // namespace bayescancel::model
