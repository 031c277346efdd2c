#ifndef BAYESCANCEL_SAMPLER_HPP
#define BAYESCANCEL_SAMPLER_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bayescancel/rng.hpp"

namespace bayescancel::sampler {

struct SamplerConfig {
  int chains = 4;
  int warmup_iters = 1000;
  int sampling_iters = 1000;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  std::uint64_t seed = 1234;
  double init_radius = 2.0;
  int max_threads = 0;  // 0: hardware count, capped by BAYES_CANCEL_THREADS

  void validate() const;
};

struct DrawStats {
  double accept_stat = 0.0;
  int tree_depth = 0;
  bool divergent = false;
  double energy = 0.0;
  double energy_error = 0.0;  // H(selected) - H(start)
};

/// Multi-chain posterior draws on the unconstrained scale.
/// draws is indexed [chain][iteration][coordinate], row-major.
struct SampleSet {
  int n_chains = 0;
  int n_iters = 0;
  std::size_t dim = 0;
  std::vector<std::string> param_names;
  std::vector<double> draws;
  std::vector<DrawStats> stats;  // [chain][iteration]
  SamplerConfig config_echo;

  std::size_t n_draws() const {
    return static_cast<std::size_t>(n_chains) * static_cast<std::size_t>(n_iters);
  }
  double value(int chain, int iter, std::size_t d) const {
    return draws[(static_cast<std::size_t>(chain) * n_iters + iter) * dim + d];
  }
  const DrawStats& stat(int chain, int iter) const {
    return stats[static_cast<std::size_t>(chain) * n_iters + iter];
  }
  /// One parameter's draws for one chain, in iteration order.
  std::vector<double> chain_param(int chain, std::size_t d) const;
  /// One parameter's draws pooled across chains (chain-major order).
  std::vector<double> param_draws(std::size_t d) const;
  /// All draws as n_draws stacked parameter vectors (chain-major order).
  std::span<const double> flat_draws() const { return draws; }
};

/// Target density callback: writes the gradient of the log density into grad
/// and returns the log density. Must be safe for concurrent read-only use.
using LogDensityFn =
    std::function<double(std::span<const double>, std::span<double>)>;

struct PhasePoint {
  std::vector<double> position;
  std::vector<double> momentum;
  std::vector<double> grad;
  double logp = 0.0;
};

/// One symplectic leapfrog step (half-kick, drift, half-kick); the gradient
/// field in `point` must match `position` on entry and does on exit.
void leapfrog(const LogDensityFn& target, PhasePoint& point, double step_size,
              std::span<const double> inv_mass_diag);

/// Dual-averaging state plus the diagonal inverse mass.
struct AdaptationState {
  double step_size = 1.0;
  std::vector<double> inv_mass_diag;

  // dual-averaging accumulators
  double mu = 0.0;
  double log_step = 0.0;
  double log_step_avg = 0.0;
  double h_bar = 0.0;
  int counter = 0;

  void restart(double step);
  void update(double accept_prob, double target_accept);
  void freeze() { step_size = std::exp(log_step_avg); }
};

struct TrajectoryStats {
  double accept_stat = 0.0;
  int tree_depth = 0;
  bool divergent = false;
  double energy = 0.0;
  double energy_error = 0.0;
  int n_leapfrog = 0;
};

/// One no-U-turn transition: doubles the trajectory until the U-turn
/// criterion or max_tree_depth, selecting the next state by multinomial
/// weighting. Updates `point` in place.
TrajectoryStats build_trajectory(const LogDensityFn& target, PhasePoint& point,
                                 const AdaptationState& adapt,
                                 int max_tree_depth, Rng& rng);

/// Runs `config.chains` independent NUTS chains over the target and returns
/// post-warmup draws. Chain k's stream is a pure function of (seed, k);
/// identical inputs give bit-identical output regardless of thread count.
SampleSet nuts_sample(const LogDensityFn& target, std::size_t dim,
                      const std::vector<std::string>& param_names,
                      const SamplerConfig& config,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace bayescancel::sampler

#endif
