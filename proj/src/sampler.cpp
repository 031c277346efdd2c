#include "bayescancel/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"

namespace bayescancel::sampler {

namespace {

constexpr double kDivergenceThreshold = 1000.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// dual-averaging constants (Hoffman & Gelman)
constexpr double kAdaptGamma = 0.15;
constexpr double kAdaptT0 = 10.0;
constexpr double kAdaptKappa = 0.75;

double kinetic_energy(std::span<const double> momentum,
                      std::span<const double> inv_mass) {
  double k = 0.0;
  for (std::size_t d = 0; d < momentum.size(); ++d) {
    k += momentum[d] * momentum[d] * inv_mass[d];
  }
  return 0.5 * k;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Evaluates the target, mapping thrown domain errors and non-finite
/// positions to log density -inf so the trajectory is flagged divergent
/// instead of crashing mid-step.
double safe_logp_grad(const LogDensityFn& target, std::span<const double> position,
                      std::span<double> grad) {
  if (!all_finite(position)) return kNegInf;
  try {
    const double lp = target(position, grad);
    return std::isnan(lp) ? kNegInf : lp;
  } catch (const Error&) {
    return kNegInf;
  }
}

struct Subtree {
  PhasePoint leftmost;
  PhasePoint rightmost;
  PhasePoint proposal;
  double proposal_hamiltonian = 0.0;
  double log_weight = kNegInf;  // log sum of exp(H0 - H) over the subtree
  double sum_accept = 0.0;
  int n_leapfrog = 0;
  bool divergent = false;
  bool turning = false;
};

bool is_uturn(const PhasePoint& left, const PhasePoint& right,
              std::span<const double> inv_mass) {
  double fwd = 0.0;
  double bwd = 0.0;
  for (std::size_t d = 0; d < inv_mass.size(); ++d) {
    const double delta = right.position[d] - left.position[d];
    fwd += delta * inv_mass[d] * right.momentum[d];
    bwd += delta * inv_mass[d] * left.momentum[d];
  }
  return fwd < 0.0 || bwd < 0.0;
}

Subtree build_tree(const LogDensityFn& target, const PhasePoint& from, int depth,
                   double direction, double hamiltonian0,
                   const AdaptationState& adapt, Rng& rng) {
  const std::span<const double> inv_mass(adapt.inv_mass_diag);
  if (depth == 0) {
    Subtree leaf;
    leaf.proposal = from;
    leapfrog(target, leaf.proposal, direction * adapt.step_size, inv_mass);
    leaf.n_leapfrog = 1;
    const double h = -leaf.proposal.logp +
                     kinetic_energy(leaf.proposal.momentum, inv_mass);
    const double delta = h - hamiltonian0;
    if (!std::isfinite(delta) || delta > kDivergenceThreshold) {
      leaf.divergent = true;
      leaf.log_weight = kNegInf;
      leaf.sum_accept = 0.0;
    } else {
      leaf.log_weight = -delta;
      leaf.sum_accept = std::min(1.0, std::exp(-delta));
    }
    leaf.proposal_hamiltonian = h;
    leaf.leftmost = leaf.proposal;
    leaf.rightmost = leaf.proposal;
    return leaf;
  }

  Subtree first = build_tree(target, from, depth - 1, direction, hamiltonian0,
                             adapt, rng);
  if (first.divergent || first.turning) return first;

  const PhasePoint& edge = direction > 0 ? first.rightmost : first.leftmost;
  Subtree second = build_tree(target, edge, depth - 1, direction, hamiltonian0,
                              adapt, rng);

  Subtree merged;
  merged.n_leapfrog = first.n_leapfrog + second.n_leapfrog;
  merged.sum_accept = first.sum_accept + second.sum_accept;
  merged.divergent = second.divergent;
  merged.turning = second.turning;
  if (direction > 0) {
    merged.leftmost = std::move(first.leftmost);
    merged.rightmost = second.rightmost;
  } else {
    merged.leftmost = second.leftmost;
    merged.rightmost = std::move(first.rightmost);
  }
  merged.log_weight = math::log_add_exp(first.log_weight, second.log_weight);
  // uniform multinomial choice between the two halves
  const bool take_second =
      second.log_weight > kNegInf &&
      std::log(rng.uniform()) < second.log_weight - merged.log_weight;
  if (take_second) {
    merged.proposal = std::move(second.proposal);
    merged.proposal_hamiltonian = second.proposal_hamiltonian;
  } else {
    merged.proposal = std::move(first.proposal);
    merged.proposal_hamiltonian = first.proposal_hamiltonian;
  }
  if (!merged.divergent && !merged.turning) {
    merged.turning = is_uturn(merged.leftmost, merged.rightmost,
                              std::span<const double>(adapt.inv_mass_diag));
  }
  return merged;
}

/// Streaming mean/variance accumulator.
class Welford {
 public:
  explicit Welford(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void add(std::span<const double> x) {
    ++count_;
    for (std::size_t d = 0; d < mean_.size(); ++d) {
      const double delta = x[d] - mean_[d];
      mean_[d] += delta / static_cast<double>(count_);
      m2_[d] += delta * (x[d] - mean_[d]);
    }
  }

  long count() const { return count_; }

  double variance(std::size_t d) const {
    return count_ > 1 ? m2_[d] / static_cast<double>(count_ - 1) : 0.0;
  }

  void reset() {
    count_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  long count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

void refresh_momentum(PhasePoint& point, std::span<const double> inv_mass,
                      Rng& rng) {
  for (std::size_t d = 0; d < point.momentum.size(); ++d) {
    point.momentum[d] = rng.normal() / std::sqrt(inv_mass[d]);
  }
}

/// Stan-style heuristic: double or halve the step size until one leapfrog
/// step from the current point crosses acceptance 0.5.
double find_initial_step_size(const LogDensityFn& target, const PhasePoint& start,
                              std::span<const double> inv_mass, Rng& rng,
                              double step_size) {
  PhasePoint probe = start;
  refresh_momentum(probe, inv_mass, rng);
  const double h0 = -probe.logp + kinetic_energy(probe.momentum, inv_mass);

  auto log_accept = [&](double eps) {
    PhasePoint p = probe;
    leapfrog(target, p, eps, inv_mass);
    const double h = -p.logp + kinetic_energy(p.momentum, inv_mass);
    const double delta = h0 - h;
    return std::isfinite(delta) ? std::min(0.0, delta) : kNegInf;
  };

  const double target_log = std::log(0.5);
  double la = log_accept(step_size);
  const bool increase = la > target_log;
  for (int it = 0; it < 100; ++it) {
    if (increase) {
      if (la <= target_log) break;
      step_size *= 2.0;
    } else {
      if (la >= target_log) break;
      step_size *= 0.5;
    }
    if (step_size > 1e7 || step_size < 1e-10) break;
    la = log_accept(step_size);
  }
  return std::clamp(step_size, 1e-10, 1e7);
}

/// Mass-update boundaries between the initial and terminal step-size-only
/// buffers: expanding windows 25, 50, 100, ...; the last window absorbs the
/// remainder so it always ends at warmup - term_buffer.
std::vector<int> adaptation_window_ends(int warmup) {
  constexpr int kInit = 75;
  constexpr int kTerm = 50;
  std::vector<int> ends;
  int begin = kInit;
  int size = 25;
  const int last = warmup - kTerm;
  while (begin < last) {
    int end = begin + size;
    if (end + 2 * size > last || end > last) end = last;
    ends.push_back(end);
    begin = end;
    size *= 2;
  }
  return ends;
}

struct ChainResult {
  std::vector<double> draws;
  std::vector<DrawStats> stats;
  bool mass_floored = false;
};

ChainResult run_chain(const LogDensityFn& target, std::size_t dim,
                      const SamplerConfig& config, int chain) {
  Rng rng = Rng::for_chain(config.seed, chain);

  PhasePoint point;
  point.position.resize(dim);
  point.momentum.assign(dim, 0.0);
  point.grad.resize(dim);

  bool initialized = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (std::size_t d = 0; d < dim; ++d) {
      point.position[d] = rng.uniform(-config.init_radius, config.init_radius);
    }
    point.logp = safe_logp_grad(target, point.position, point.grad);
    if (std::isfinite(point.logp) && all_finite(point.grad)) {
      initialized = true;
      break;
    }
  }
  if (!initialized) {
    throw SamplerError("chain " + std::to_string(chain) +
                       ": no finite log posterior after 100 initialization draws");
  }

  AdaptationState adapt;
  adapt.inv_mass_diag.assign(dim, 1.0);
  adapt.step_size = find_initial_step_size(target, point, adapt.inv_mass_diag,
                                           rng, 1.0);
  adapt.restart(adapt.step_size);

  const std::vector<int> window_ends = adaptation_window_ends(config.warmup_iters);
  std::size_t window_idx = 0;
  Welford accum(dim);
  bool mass_floored = false;

  for (int t = 0; t < config.warmup_iters; ++t) {
    refresh_momentum(point, adapt.inv_mass_diag, rng);
    const TrajectoryStats ts =
        build_trajectory(target, point, adapt, config.max_tree_depth, rng);
    adapt.update(ts.accept_stat, config.target_accept);

    const bool in_window = t >= 75 && t < config.warmup_iters - 50;
    if (in_window) accum.add(point.position);

    if (window_idx < window_ends.size() && t + 1 == window_ends[window_idx]) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double n = static_cast<double>(accum.count());
        double var = accum.variance(d);
        if (var == 0.0) {
          // degenerate coordinate: keep the mass finite and flag it
          var = 1e-10;
          mass_floored = true;
        } else {
          var = (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0));
        }
        adapt.inv_mass_diag[d] = var;
      }
      accum.reset();
      ++window_idx;
      adapt.step_size = find_initial_step_size(target, point,
                                               adapt.inv_mass_diag, rng,
                                               adapt.step_size);
      adapt.restart(adapt.step_size);
    }
  }
  adapt.freeze();

  ChainResult result;
  result.mass_floored = mass_floored;
  result.draws.resize(static_cast<std::size_t>(config.sampling_iters) * dim);
  result.stats.resize(config.sampling_iters);
  for (int t = 0; t < config.sampling_iters; ++t) {
    refresh_momentum(point, adapt.inv_mass_diag, rng);
    const TrajectoryStats ts =
        build_trajectory(target, point, adapt, config.max_tree_depth, rng);
    std::copy(point.position.begin(), point.position.end(),
              result.draws.begin() + static_cast<std::size_t>(t) * dim);
    DrawStats& st = result.stats[t];
    st.accept_stat = ts.accept_stat;
    st.tree_depth = ts.tree_depth;
    st.divergent = ts.divergent;
    st.energy = ts.energy;
    st.energy_error = ts.energy_error;
  }
  return result;
}

int resolve_thread_count(const SamplerConfig& config) {
  int cap = config.max_threads;
  if (const char* env = std::getenv("BAYES_CANCEL_THREADS")) {
    const int env_cap = std::atoi(env);
    if (env_cap > 0) cap = cap > 0 ? std::min(cap, env_cap) : env_cap;
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int threads = cap > 0 ? cap : hw;
  return std::max(1, std::min(threads, config.chains));
}

}  // namespace

void SamplerConfig::validate() const {
  if (chains < 1) throw ConfigError("sampler.chains must be >= 1");
  if (warmup_iters < 150) throw ConfigError("sampler.warmup must be >= 150");
  if (sampling_iters < 1) throw ConfigError("sampler.samples must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw ConfigError("sampler.target_accept must lie in (0, 1)");
  }
  if (max_tree_depth < 1 || max_tree_depth > 15) {
    throw ConfigError("sampler.max_tree_depth must lie in [1, 15]");
  }
  if (!(init_radius > 0.0)) throw ConfigError("sampler.init_radius must be positive");
}

std::vector<double> SampleSet::chain_param(int chain, std::size_t d) const {
  std::vector<double> out(n_iters);
  for (int t = 0; t < n_iters; ++t) out[t] = value(chain, t, d);
  return out;
}

std::vector<double> SampleSet::param_draws(std::size_t d) const {
  std::vector<double> out;
  out.reserve(n_draws());
  for (int c = 0; c < n_chains; ++c) {
    for (int t = 0; t < n_iters; ++t) out.push_back(value(c, t, d));
  }
  return out;
}

void leapfrog(const LogDensityFn& target, PhasePoint& point, double step_size,
              std::span<const double> inv_mass_diag) {
  const std::size_t dim = point.position.size();
  for (std::size_t d = 0; d < dim; ++d) {
    point.momentum[d] += 0.5 * step_size * point.grad[d];
  }
  for (std::size_t d = 0; d < dim; ++d) {
    point.position[d] += step_size * inv_mass_diag[d] * point.momentum[d];
  }
  point.logp = safe_logp_grad(target, point.position, point.grad);
  if (!std::isfinite(point.logp)) {
    std::fill(point.grad.begin(), point.grad.end(), 0.0);
  }
  for (std::size_t d = 0; d < dim; ++d) {
    point.momentum[d] += 0.5 * step_size * point.grad[d];
  }
}

void AdaptationState::restart(double step) {
  step_size = step;
  mu = std::log(10.0 * step);
  log_step = std::log(step);
  log_step_avg = std::log(step);
  h_bar = 0.0;
  counter = 0;
}

void AdaptationState::update(double accept_prob, double target_accept) {
  ++counter;
  const double frac = 1.0 / (static_cast<double>(counter) + kAdaptT0);
  h_bar = (1.0 - frac) * h_bar + frac * (target_accept - accept_prob);
  log_step = mu - std::sqrt(static_cast<double>(counter)) / kAdaptGamma * h_bar;
  const double eta = std::pow(static_cast<double>(counter), -kAdaptKappa);
  log_step_avg = eta * log_step + (1.0 - eta) * log_step_avg;
  step_size = std::exp(log_step);
}

TrajectoryStats build_trajectory(const LogDensityFn& target, PhasePoint& point,
                                 const AdaptationState& adapt,
                                 int max_tree_depth, Rng& rng) {
  const std::span<const double> inv_mass(adapt.inv_mass_diag);
  const double h0 = -point.logp + kinetic_energy(point.momentum, inv_mass);

  PhasePoint leftmost = point;
  PhasePoint rightmost = point;
  PhasePoint proposal = point;
  double proposal_h = h0;
  double log_weight_trajectory = 0.0;  // weight of the initial state
  double sum_accept = 0.0;
  int n_leapfrog = 0;

  TrajectoryStats stats;
  const int depth_budget = std::max(1, max_tree_depth);
  for (int depth = 0; depth < depth_budget; ++depth) {
    const double direction = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const PhasePoint& edge = direction > 0 ? rightmost : leftmost;
    Subtree subtree =
        build_tree(target, edge, depth, direction, h0, adapt, rng);
    sum_accept += subtree.sum_accept;
    n_leapfrog += subtree.n_leapfrog;
    if (subtree.divergent) {
      stats.divergent = true;
      break;
    }
    if (subtree.turning) break;

    // biased progressive sampling toward the new subtree
    if (subtree.log_weight > kNegInf &&
        std::log(rng.uniform()) < subtree.log_weight - log_weight_trajectory) {
      proposal = std::move(subtree.proposal);
      proposal_h = subtree.proposal_hamiltonian;
    }
    log_weight_trajectory =
        math::log_add_exp(log_weight_trajectory, subtree.log_weight);
    if (direction > 0) {
      rightmost = std::move(subtree.rightmost);
    } else {
      leftmost = std::move(subtree.leftmost);
    }
    stats.tree_depth = depth + 1;
    if (is_uturn(leftmost, rightmost, inv_mass)) break;
  }

  point = std::move(proposal);
  stats.accept_stat = n_leapfrog > 0 ? sum_accept / n_leapfrog : 0.0;
  stats.energy = proposal_h;
  stats.energy_error = proposal_h - h0;
  stats.n_leapfrog = n_leapfrog;
  return stats;
}

SampleSet nuts_sample(const LogDensityFn& target, std::size_t dim,
                      const std::vector<std::string>& param_names,
                      const SamplerConfig& config,
                      std::vector<std::string>* warnings) {
  config.validate();
  if (param_names.size() != dim) {
    throw ShapeError("nuts_sample: param_names does not match dimension");
  }

  std::vector<ChainResult> results(config.chains);
  std::vector<std::exception_ptr> failures(config.chains);
  const int n_threads = resolve_thread_count(config);

  std::atomic<int> next_chain{0};
  auto worker = [&] {
    for (;;) {
      const int c = next_chain.fetch_add(1);
      if (c >= config.chains) return;
      try {
        results[c] = run_chain(target, dim, config, c);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  SampleSet set;
  set.n_chains = config.chains;
  set.n_iters = config.sampling_iters;
  set.dim = dim;
  set.param_names = param_names;
  set.config_echo = config;
  set.draws.reserve(set.n_draws() * dim);
  set.stats.reserve(set.n_draws());
  long n_divergent = 0;
  bool mass_floored = false;
  for (int c = 0; c < config.chains; ++c) {
    set.draws.insert(set.draws.end(), results[c].draws.begin(),
                     results[c].draws.end());
    set.stats.insert(set.stats.end(), results[c].stats.begin(),
                     results[c].stats.end());
    mass_floored = mass_floored || results[c].mass_floored;
    for (const DrawStats& st : results[c].stats) n_divergent += st.divergent;
  }
  if (warnings && mass_floored) {
    warnings->push_back(
        "a coordinate had zero sample variance during adaptation; its inverse "
        "mass entry was floored at 1e-10");
  }

  const double divergent_frac =
      static_cast<double>(n_divergent) / static_cast<double>(set.n_draws());
  if (divergent_frac > 0.25) {
    throw SamplerError(std::to_string(n_divergent) + " of " +
                       std::to_string(set.n_draws()) +
                       " transitions were divergent (" +
                       std::to_string(100.0 * divergent_frac) +
                       "%); the posterior geometry defeats the integrator");
  }
  if (warnings && n_divergent > 0) {
    warnings->push_back(std::to_string(n_divergent) +
                        " divergent transitions after warmup");
  }
  return set;
}

}  // namespace bayescancel::sampler
