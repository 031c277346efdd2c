#ifndef BAYESCANCEL_DIAGNOSTICS_HPP
#define BAYESCANCEL_DIAGNOSTICS_HPP

#include <span>
#include <string>
#include <vector>

#include "bayescancel/sampler.hpp"

namespace bayescancel::diagnostics {

/// Draws for a single parameter, n_chains x n_iters row-major.
struct ChainDraws {
  std::size_t n_chains = 0;
  std::size_t n_iters = 0;
  std::vector<double> values;

  std::span<const double> chain(std::size_t c) const {
    return std::span<const double>(values).subspan(c * n_iters, n_iters);
  }
  static ChainDraws from_sample_set(const sampler::SampleSet& samples,
                                    std::size_t param);
};

/// Joint rank-normalization: average ranks for ties, then the inverse-normal
/// transform of (r - 3/8) / (S + 1/4).
std::vector<double> rank_normalize(std::span<const double> values);

/// Each chain split in half (an odd middle draw is dropped).
ChainDraws split_chains(const ChainDraws& draws);

/// Max of the bulk and folded rank-normalized split-chain potential scale
/// reduction factors. Constant draws give NaN.
double split_rank_rhat(const ChainDraws& draws);

/// Bulk variant alone; exactly invariant under monotone transforms of the
/// draws (the folded variant is not, since folding happens before ranking).
double split_rank_rhat_bulk(const ChainDraws& draws);

/// ESS of rank-normalized split chains, Geyer initial-monotone truncation.
double ess_bulk(const ChainDraws& draws);

/// Minimum ESS of the 5% / 95% tail indicator sequences.
double ess_tail(const ChainDraws& draws);

struct SummaryRow {
  std::string name;
  double estimate = 0.0;
  double est_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double rhat = 0.0;
  double ess_bulk = 0.0;
  double ess_tail = 0.0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

/// Per-parameter posterior mean, sd, equal-tailed 95% interval, Rhat and
/// bulk/tail ESS. log_phi is reported as phi on the natural scale. Rows with
/// ESS below 400 or non-finite Rhat get a warning.
SummaryTable summarize(const sampler::SampleSet& samples);
SummaryTable summarize(const sampler::SampleSet& samples,
                       const std::vector<std::string>& names);

}  // namespace bayescancel::diagnostics

#endif
