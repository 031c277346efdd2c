#include "bayescancel/predict.hpp"

#include <algorithm>
#include <cmath>

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"
#include "bayescancel/rng.hpp"

namespace bayescancel::predict {

namespace {

std::size_t coef_count(const sampler::SampleSet& samples) {
  if (!samples.param_names.empty() && samples.param_names.back() == "log_phi") {
    return samples.dim - 1;
  }
  return samples.dim;
}

/// 2.5% / 97.5% order statistics (inverse empirical CDF, no interpolation);
/// outcomes stay in {0, 1}.
std::pair<double, double> order_statistic_bounds(std::vector<double> sorted_outcomes) {
  const std::size_t s = sorted_outcomes.size();
  auto pick = [&](double p) {
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(s)));
    if (idx == 0) idx = 1;
    if (idx > s) idx = s;
    return sorted_outcomes[idx - 1];
  };
  return {pick(0.025), pick(0.975)};
}

}  // namespace

std::vector<double> posterior_epred(const sampler::SampleSet& samples,
                                    std::span<const double> new_x) {
  const std::size_t p = coef_count(samples);
  if (new_x.size() != p) {
    throw ShapeError("posterior_epred: new row has " +
                     std::to_string(new_x.size()) + " columns, model has " +
                     std::to_string(p));
  }
  std::vector<double> mu;
  mu.reserve(samples.n_draws());
  const std::span<const double> draws = samples.flat_draws();
  for (std::size_t s = 0; s < samples.n_draws(); ++s) {
    const double* theta = draws.data() + s * samples.dim;
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j) eta += new_x[j] * theta[j];
    mu.push_back(math::sigmoid(eta));
  }
  return mu;
}

std::vector<int> posterior_predict(const sampler::SampleSet& samples,
                                   std::span<const double> new_x,
                                   std::uint64_t seed) {
  const std::vector<double> mu = posterior_epred(samples, new_x);
  Rng rng(seed);
  std::vector<int> outcomes(mu.size());
  for (std::size_t s = 0; s < mu.size(); ++s) outcomes[s] = rng.bernoulli(mu[s]);
  return outcomes;
}

std::vector<PredictionRow> prediction_table(const sampler::SampleSet& samples,
                                            const ingest::DesignMatrix& new_rows,
                                            PredictionMode mode,
                                            std::uint64_t seed) {
  if (new_rows.n_rows == 0) throw SizeError("prediction_table: no rows to predict");
  Rng rng(seed);
  std::vector<PredictionRow> table;
  table.reserve(new_rows.n_rows);
  for (std::size_t i = 0; i < new_rows.n_rows; ++i) {
    const std::vector<double> mu = posterior_epred(samples, new_rows.row(i));
    std::vector<double> values;
    values.reserve(mu.size());
    if (mode == PredictionMode::binary) {
      for (double m : mu) values.push_back(static_cast<double>(rng.bernoulli(m)));
    } else {
      values = mu;
    }
    PredictionRow row;
    row.estimate = math::mean(values);
    row.est_error = std::sqrt(math::sample_variance(values));
    std::sort(values.begin(), values.end());
    if (mode == PredictionMode::binary) {
      const auto [lo, hi] = order_statistic_bounds(std::move(values));
      row.q2_5 = lo;
      row.q97_5 = hi;
    } else {
      row.q2_5 = math::quantile_sorted(values, 0.025);
      row.q97_5 = math::quantile_sorted(values, 0.975);
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace bayescancel::predict
