#ifndef BAYESCANCEL_CONFIG_HPP
#define BAYESCANCEL_CONFIG_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bayescancel/ingest.hpp"
#include "bayescancel/model.hpp"
#include "bayescancel/sampler.hpp"

namespace bayescancel::config {

/// Fully resolved run configuration. Every field has a default except
/// data_path; file values are overridden by flags.
struct RunConfig {
  std::string data_path;
  std::string family = "logistic";
  std::vector<std::string> features = ingest::default_features();
  std::string positive_label = "Not_Canceled";
  std::size_t subsample_n = 0;  // 0: use every row
  std::uint64_t subsample_seed = 1;
  bool aggregate = false;

  // prior overrides; NaN means the family default applies
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  double prior_intercept_mean = kUnset;
  double prior_intercept_sd = kUnset;
  double prior_slope_mean = kUnset;
  double prior_slope_sd = kUnset;
  double prior_phi_shape = kUnset;
  double prior_phi_rate = kUnset;

  sampler::SamplerConfig smp;

  std::string out_dir = "bayescancel-out";
  std::string format = "text";  // text | csv | json

  std::string predict_input;
  std::string predict_mode = "binary";
  std::uint64_t predict_seed = 1;

  double sim_intercept = 0.0;
  std::vector<double> sim_slopes;
  double sim_phi = 2.0;
  std::size_t sim_patterns = 1000;
  long sim_trials = 1;
  std::uint64_t sim_seed = 1;

  model::PriorSpec resolve_priors(model::Family family) const;

  /// Flat dotted-key view, the format echoed into the run directory.
  std::map<std::string, std::string> to_map() const;
};

/// Flat key-value file: `key = value` lines, optional `[section]` headers
/// prefixing subsequent keys, `#` comments.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies file keys onto the config; unknown keys raise ConfigError.
void apply_config_map(RunConfig& config,
                      const std::map<std::string, std::string>& map);

void write_config_echo(const std::map<std::string, std::string>& map,
                       const std::string& path);

std::vector<std::string> split_list(const std::string& text);
std::vector<double> split_doubles(const std::string& text);

}  // namespace bayescancel::config

#endif
