#include "bayescancel/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bayescancel/errors.hpp"
#include "bayescancel/io.hpp"

namespace bayescancel::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  const auto b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += parts[i];
  }
  return out;
}

std::string join(const std::vector<double>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += io::format_full(parts[i]);
  }
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    out.push_back(to_double("list entry", item));
  }
  return out;
}

model::PriorSpec RunConfig::resolve_priors(model::Family fam) const {
  model::PriorSpec priors = fam == model::Family::bernoulli_logit
                                ? model::PriorSpec::logistic_defaults()
                                : model::PriorSpec::beta_binomial_defaults();
  if (!std::isnan(prior_intercept_mean)) priors.intercept_mean = prior_intercept_mean;
  if (!std::isnan(prior_intercept_sd)) priors.intercept_sd = prior_intercept_sd;
  if (!std::isnan(prior_slope_mean)) priors.slope_mean = prior_slope_mean;
  if (!std::isnan(prior_slope_sd)) priors.slope_sd = prior_slope_sd;
  if (!std::isnan(prior_phi_shape)) priors.phi_shape = prior_phi_shape;
  if (!std::isnan(prior_phi_rate)) priors.phi_rate = prior_phi_rate;
  return priors;
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["data.path"] = data_path;
  m["data.features"] = join(features);
  m["data.positive_label"] = positive_label;
  m["data.subsample_n"] = std::to_string(subsample_n);
  m["data.subsample_seed"] = std::to_string(subsample_seed);
  m["data.aggregate"] = aggregate ? "1" : "0";
  m["model.family"] = family;
  const model::PriorSpec priors =
      resolve_priors(model::family_from_name(family));
  m["prior.intercept_mean"] = io::format_full(priors.intercept_mean);
  m["prior.intercept_sd"] = io::format_full(priors.intercept_sd);
  m["prior.slope_mean"] = io::format_full(priors.slope_mean);
  m["prior.slope_sd"] = io::format_full(priors.slope_sd);
  m["prior.phi_shape"] = io::format_full(priors.phi_shape);
  m["prior.phi_rate"] = io::format_full(priors.phi_rate);
  m["sampler.chains"] = std::to_string(smp.chains);
  m["sampler.warmup"] = std::to_string(smp.warmup_iters);
  m["sampler.samples"] = std::to_string(smp.sampling_iters);
  m["sampler.target_accept"] = io::format_full(smp.target_accept);
  m["sampler.max_tree_depth"] = std::to_string(smp.max_tree_depth);
  m["sampler.seed"] = std::to_string(smp.seed);
  m["sampler.init_radius"] = io::format_full(smp.init_radius);
  m["sampler.max_threads"] = std::to_string(smp.max_threads);
  m["out.dir"] = out_dir;
  m["out.format"] = format;
  m["predict.input"] = predict_input;
  m["predict.mode"] = predict_mode;
  m["predict.seed"] = std::to_string(predict_seed);
  m["simulate.intercept"] = io::format_full(sim_intercept);
  m["simulate.slopes"] = join(sim_slopes);
  m["simulate.phi"] = io::format_full(sim_phi);
  m["simulate.patterns"] = std::to_string(sim_patterns);
  m["simulate.trials"] = std::to_string(sim_trials);
  m["simulate.seed"] = std::to_string(sim_seed);
  return m;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> map;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ": expected 'key = value', got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    map[key] = value;
  }
  return map;
}

void apply_config_map(RunConfig& config,
                      const std::map<std::string, std::string>& map) {
  for (const auto& [key, value] : map) {
    if (key == "data.path") {
      config.data_path = value;
    } else if (key == "data.features") {
      config.features = split_list(value);
    } else if (key == "data.positive_label") {
      config.positive_label = value;
    } else if (key == "data.subsample_n") {
      config.subsample_n = static_cast<std::size_t>(to_long(key, value));
    } else if (key == "data.subsample_seed") {
      config.subsample_seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "data.aggregate") {
      config.aggregate = to_long(key, value) != 0;
    } else if (key == "model.family") {
      config.family = value;
    } else if (key == "prior.intercept_mean") {
      config.prior_intercept_mean = to_double(key, value);
    } else if (key == "prior.intercept_sd") {
      config.prior_intercept_sd = to_double(key, value);
    } else if (key == "prior.slope_mean") {
      config.prior_slope_mean = to_double(key, value);
    } else if (key == "prior.slope_sd") {
      config.prior_slope_sd = to_double(key, value);
    } else if (key == "prior.phi_shape") {
      config.prior_phi_shape = to_double(key, value);
    } else if (key == "prior.phi_rate") {
      config.prior_phi_rate = to_double(key, value);
    } else if (key == "sampler.chains") {
      config.smp.chains = static_cast<int>(to_long(key, value));
    } else if (key == "sampler.warmup") {
      config.smp.warmup_iters = static_cast<int>(to_long(key, value));
    } else if (key == "sampler.samples") {
      config.smp.sampling_iters = static_cast<int>(to_long(key, value));
    } else if (key == "sampler.target_accept") {
      config.smp.target_accept = to_double(key, value);
    } else if (key == "sampler.max_tree_depth") {
      config.smp.max_tree_depth = static_cast<int>(to_long(key, value));
    } else if (key == "sampler.seed") {
      config.smp.seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "sampler.init_radius") {
      config.smp.init_radius = to_double(key, value);
    } else if (key == "sampler.max_threads") {
      config.smp.max_threads = static_cast<int>(to_long(key, value));
    } else if (key == "out.dir") {
      config.out_dir = value;
    } else if (key == "out.format") {
      config.format = value;
    } else if (key == "predict.input") {
      config.predict_input = value;
    } else if (key == "predict.mode") {
      config.predict_mode = value;
    } else if (key == "predict.seed") {
      config.predict_seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "simulate.intercept") {
      config.sim_intercept = to_double(key, value);
    } else if (key == "simulate.slopes") {
      config.sim_slopes = split_doubles(value);
    } else if (key == "simulate.phi") {
      config.sim_phi = to_double(key, value);
    } else if (key == "simulate.patterns") {
      config.sim_patterns = static_cast<std::size_t>(to_long(key, value));
    } else if (key == "simulate.trials") {
      config.sim_trials = to_long(key, value);
    } else if (key == "simulate.seed") {
      config.sim_seed = static_cast<std::uint64_t>(to_long(key, value));
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

void write_config_echo(const std::map<std::string, std::string>& map,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config echo: " + path);
  out << "# bayescancel-config v1\n";
  for (const auto& [key, value] : map) {
    out << key << " = " << value << "\n";
  }
}

}  // namespace bayescancel::config
