#ifndef BAYESCANCEL_FIT_HPP
#define BAYESCANCEL_FIT_HPP

#include <string>
#include <vector>

#include "bayescancel/ingest.hpp"
#include "bayescancel/model.hpp"
#include "bayescancel/sampler.hpp"

namespace bayescancel {

struct FitResult {
  sampler::SampleSet samples;
  std::vector<std::string> warnings;
};

/// Draws from the posterior of the given model over the design matrix.
/// Fitting the beta-binomial family on all-n=1 data is permitted but warns
/// that phi is unidentifiable (its posterior equals the prior).
FitResult fit_model(const model::ModelSpec& spec, const ingest::DesignMatrix& dm,
                    const sampler::SamplerConfig& config);

}  // namespace bayescancel

#endif
