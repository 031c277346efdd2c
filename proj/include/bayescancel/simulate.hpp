#ifndef BAYESCANCEL_SIMULATE_HPP
#define BAYESCANCEL_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bayescancel/model.hpp"

namespace bayescancel::simulate {

/// Synthetic booking generator. Each covariate pattern expands to `trials`
/// bookings with identical predictors, so aggregate_trials recovers grouped
/// (y, n) data exactly. Slopes align with generator_design_columns() and are
/// zero-padded on the right.
struct GeneratorSpec {
  model::Family family = model::Family::bernoulli_logit;
  double intercept = 0.0;
  std::vector<double> slopes;
  double phi = 2.0;  // beta-binomial mixing precision
  std::size_t n_patterns = 1000;
  long trials = 1;
  std::uint64_t seed = 1;
  std::string positive_label = "Not_Canceled";

  void validate() const;
};

/// Slope order: the ten numeric defaults, then the room-type dummies
/// (reference Room_Type1).
const std::vector<std::string>& generator_design_columns();

/// CSV text in the 17-column booking schema.
std::string simulate_csv(const GeneratorSpec& spec);

/// Writes the dataset and a JSON file with the generating parameters.
void write_simulated_csv(const GeneratorSpec& spec, const std::string& csv_path,
                         const std::string& truth_path);

}  // namespace bayescancel::simulate

#endif
