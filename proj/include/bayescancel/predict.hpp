#ifndef BAYESCANCEL_PREDICT_HPP
#define BAYESCANCEL_PREDICT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bayescancel/ingest.hpp"
#include "bayescancel/sampler.hpp"

namespace bayescancel::predict {

/// Per-draw success probabilities sigmoid(x . beta) for one new row.
/// The row layout must match the training design matrix; a trailing log_phi
/// coordinate in the draws is ignored.
std::vector<double> posterior_epred(const sampler::SampleSet& samples,
                                    std::span<const double> new_x);

/// Per-draw Bernoulli outcomes from the posterior predictive.
std::vector<int> posterior_predict(const sampler::SampleSet& samples,
                                   std::span<const double> new_x,
                                   std::uint64_t seed);

enum class PredictionMode { binary, probability };

struct PredictionRow {
  double estimate = 0.0;
  double est_error = 0.0;
  double q2_5 = 0.0;
  double q97_5 = 0.0;
};

/// One summary row per new observation. Binary mode draws 0/1 outcomes and
/// reports order-statistic quantiles (always 0 or 1); probability mode
/// summarizes the per-draw probabilities with interpolated quantiles.
std::vector<PredictionRow> prediction_table(const sampler::SampleSet& samples,
                                            const ingest::DesignMatrix& new_rows,
                                            PredictionMode mode,
                                            std::uint64_t seed);

}  // namespace bayescancel::predict

#endif
