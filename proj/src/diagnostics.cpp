#include "bayescancel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"

namespace bayescancel::diagnostics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v[0]) return false;
  }
  return true;
}

/// Between/within variance PSRF on already transformed split chains.
double basic_rhat(const ChainDraws& draws) {
  const std::size_t m = draws.n_chains;
  const std::size_t n = draws.n_iters;
  std::vector<double> chain_means(m);
  std::vector<double> chain_vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    chain_means[c] = math::mean(draws.chain(c));
    chain_vars[c] = math::sample_variance(draws.chain(c));
  }
  const double w = math::mean(chain_vars);
  const double b = static_cast<double>(n) * math::sample_variance(chain_means);
  if (!(w > 0.0)) return kNaN;
  const double var_plus =
      (static_cast<double>(n) - 1.0) / static_cast<double>(n) * w +
      b / static_cast<double>(n);
  return std::sqrt(var_plus / w);
}

/// Autocovariance at all lags for one chain, divisor n.
std::vector<double> autocovariance(std::span<const double> x) {
  const std::size_t n = x.size();
  const double m = math::mean(x);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - m;
  std::vector<double> acov(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) acc += centered[i] * centered[i + t];
    acov[t] = acc / static_cast<double>(n);
  }
  return acov;
}

/// ESS of already transformed split chains: paired autocorrelations with
/// Geyer's initial positive and monotone sequence truncation.
double basic_ess(const ChainDraws& draws) {
  const std::size_t m = draws.n_chains;
  const std::size_t n = draws.n_iters;
  if (n < 4) return kNaN;

  std::vector<std::vector<double>> acov(m);
  std::vector<double> chain_vars(m);
  std::vector<double> chain_means(m);
  for (std::size_t c = 0; c < m; ++c) {
    acov[c] = autocovariance(draws.chain(c));
    chain_vars[c] = acov[c][0] * static_cast<double>(n) / (static_cast<double>(n) - 1.0);
    chain_means[c] = math::mean(draws.chain(c));
  }
  const double mean_var = math::mean(chain_vars);
  double var_plus = mean_var * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
  if (m > 1) var_plus += math::sample_variance(chain_means);
  if (!(var_plus > 0.0)) return kNaN;

  auto mean_acov = [&](std::size_t t) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c) acc += acov[c][t];
    return acc / static_cast<double>(m);
  };

  std::vector<double> rho(n, 0.0);
  rho[0] = 1.0;
  rho[1] = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  double rho_even = rho[0];
  double rho_odd = rho[1];
  std::size_t t = 0;
  while (t + 5 < n && !std::isnan(rho_even + rho_odd) &&
         rho_even + rho_odd > 0.0) {
    t += 2;
    rho_even = 1.0 - (mean_var - mean_acov(t)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(t + 1)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[t] = rho_even;
      rho[t + 1] = rho_odd;
    }
  }
  const std::size_t max_t = t;
  // the last even lag enters the estimate at half weight
  if (rho_even > 0.0) rho[max_t] = rho_even;

  // enforce monotone decreasing pair sums
  t = 0;
  while (t + 4 <= max_t) {
    t += 2;
    if (rho[t] + rho[t + 1] > rho[t - 2] + rho[t - 1]) {
      rho[t] = (rho[t - 2] + rho[t - 1]) / 2.0;
      rho[t + 1] = rho[t];
    }
  }

  const double total = static_cast<double>(m) * static_cast<double>(n);
  double tau = -1.0 + rho[max_t];
  for (std::size_t k = 0; k < max_t; ++k) tau += 2.0 * rho[k];
  tau = std::max(tau, 1.0 / std::log10(total));
  double ess = total / tau;
  return std::min(ess, 1.5 * total);  // rank-normalized estimator cap
}

ChainDraws transform_chains(const ChainDraws& draws,
                            const std::vector<double>& transformed) {
  ChainDraws out = draws;
  out.values = transformed;
  return out;
}

double ess_of(const ChainDraws& split, std::span<const double> values) {
  if (is_constant(values)) return kNaN;
  return basic_ess(transform_chains(split, rank_normalize(values)));
}

}  // namespace

ChainDraws ChainDraws::from_sample_set(const sampler::SampleSet& samples,
                                       std::size_t param) {
  ChainDraws out;
  out.n_chains = static_cast<std::size_t>(samples.n_chains);
  out.n_iters = static_cast<std::size_t>(samples.n_iters);
  out.values.reserve(out.n_chains * out.n_iters);
  for (int c = 0; c < samples.n_chains; ++c) {
    for (int t = 0; t < samples.n_iters; ++t) {
      out.values.push_back(samples.value(c, t, param));
    }
  }
  return out;
}

std::vector<double> rank_normalize(std::span<const double> values) {
  const std::size_t s = values.size();
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(s);
  std::size_t i = 0;
  while (i < s) {
    std::size_t j = i;
    while (j + 1 < s && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
    i = j + 1;
  }

  std::vector<double> z(s);
  const double denom = static_cast<double>(s) + 0.25;
  for (std::size_t k = 0; k < s; ++k) {
    z[k] = math::inv_std_normal_cdf((ranks[k] - 0.375) / denom);
  }
  return z;
}

ChainDraws split_chains(const ChainDraws& draws) {
  const std::size_t half = draws.n_iters / 2;
  ChainDraws out;
  out.n_chains = draws.n_chains * 2;
  out.n_iters = half;
  out.values.reserve(out.n_chains * half);
  for (std::size_t c = 0; c < draws.n_chains; ++c) {
    const auto chain = draws.chain(c);
    out.values.insert(out.values.end(), chain.begin(), chain.begin() + half);
    out.values.insert(out.values.end(), chain.end() - half, chain.end());
  }
  return out;
}

double split_rank_rhat_bulk(const ChainDraws& draws) {
  const ChainDraws split = split_chains(draws);
  if (split.n_iters < 4 || is_constant(split.values)) return kNaN;
  return basic_rhat(transform_chains(split, rank_normalize(split.values)));
}

double split_rank_rhat(const ChainDraws& draws) {
  const ChainDraws split = split_chains(draws);
  if (split.n_iters < 4 || is_constant(split.values)) return kNaN;

  const double bulk = basic_rhat(transform_chains(split, rank_normalize(split.values)));

  const double med = math::quantile(split.values, 0.5);
  std::vector<double> folded(split.values.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    folded[i] = std::abs(split.values[i] - med);
  }
  const double folded_rhat = basic_rhat(transform_chains(split, rank_normalize(folded)));
  if (std::isnan(bulk) || std::isnan(folded_rhat)) return kNaN;
  return std::max(bulk, folded_rhat);
}

double ess_bulk(const ChainDraws& draws) {
  const ChainDraws split = split_chains(draws);
  if (split.n_iters < 4) return kNaN;
  return ess_of(split, split.values);
}

double ess_tail(const ChainDraws& draws) {
  const ChainDraws split = split_chains(draws);
  if (split.n_iters < 4 || is_constant(split.values)) return kNaN;
  const double q05 = math::quantile(split.values, 0.05);
  const double q95 = math::quantile(split.values, 0.95);
  std::vector<double> low(split.values.size());
  std::vector<double> high(split.values.size());
  for (std::size_t i = 0; i < split.values.size(); ++i) {
    low[i] = split.values[i] <= q05 ? 1.0 : 0.0;
    high[i] = split.values[i] >= q95 ? 1.0 : 0.0;
  }
  const double e_low = ess_of(split, low);
  const double e_high = ess_of(split, high);
  if (std::isnan(e_low) || std::isnan(e_high)) return kNaN;
  return std::min(e_low, e_high);
}

SummaryTable summarize(const sampler::SampleSet& samples) {
  return summarize(samples, samples.param_names);
}

SummaryTable summarize(const sampler::SampleSet& samples,
                       const std::vector<std::string>& names) {
  if (samples.n_draws() == 0) throw SizeError("summarize: no draws");
  if (names.size() != samples.dim) {
    throw ShapeError("summarize: names do not match draw dimension");
  }
  SummaryTable table;
  for (std::size_t d = 0; d < samples.dim; ++d) {
    ChainDraws draws = ChainDraws::from_sample_set(samples, d);
    SummaryRow row;
    row.name = names[d];
    if (row.name == "log_phi") {
      // report the precision on its natural scale
      row.name = "phi";
      for (double& v : draws.values) v = std::exp(v);
    }

    std::vector<double> sorted = draws.values;
    std::sort(sorted.begin(), sorted.end());
    row.estimate = math::mean(draws.values);
    row.est_error = std::sqrt(math::sample_variance(draws.values));
    row.ci_lower = math::quantile_sorted(sorted, 0.025);
    row.ci_upper = math::quantile_sorted(sorted, 0.975);
    row.rhat = split_rank_rhat(draws);
    row.ess_bulk = ess_bulk(draws);
    row.ess_tail = ess_tail(draws);

    if (std::isnan(row.rhat) || std::isnan(row.ess_bulk) || std::isnan(row.ess_tail)) {
      table.warnings.push_back(row.name +
                               ": rhat/ess undefined (constant or too few draws)");
    } else {
      if (row.ess_bulk < 400.0) {
        table.warnings.push_back(row.name + ": ESS bulk " +
                                 std::to_string(static_cast<long>(row.ess_bulk)) +
                                 " is below 400");
      }
      if (row.ess_tail < 400.0) {
        table.warnings.push_back(row.name + ": ESS tail " +
                                 std::to_string(static_cast<long>(row.ess_tail)) +
                                 " is below 400");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace bayescancel::diagnostics
