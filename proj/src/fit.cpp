#include "bayescancel/fit.hpp"

#include <algorithm>

#include "bayescancel/errors.hpp"

namespace bayescancel {

FitResult fit_model(const model::ModelSpec& spec, const ingest::DesignMatrix& dm,
                    const sampler::SamplerConfig& config) {
  if (dm.n_rows == 0) throw DataError("fit_model: design matrix has no rows");
  if (dm.n_cols != spec.n_coef) {
    throw ShapeError("fit_model: design matrix does not match model spec");
  }
  spec.priors.validate();

  FitResult result;
  if (spec.family == model::Family::beta_binomial_logit &&
      std::all_of(dm.trials.begin(), dm.trials.end(),
                  [](long t) { return t == 1; })) {
    result.warnings.push_back(
        "all rows have trials = 1: the beta-binomial precision phi is "
        "unidentifiable and its posterior equals the prior");
  }

  const sampler::LogDensityFn target =
      [&spec, &dm](std::span<const double> theta, std::span<double> grad) {
        return model::log_posterior_grad(spec, dm, theta, grad);
      };
  result.samples = sampler::nuts_sample(target, spec.dim(),
                                        spec.param_names(dm), config,
                                        &result.warnings);
  return result;
}

}  // namespace bayescancel
