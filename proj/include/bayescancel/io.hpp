#ifndef BAYESCANCEL_IO_HPP
#define BAYESCANCEL_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bayescancel/diagnostics.hpp"
#include "bayescancel/loo.hpp"
#include "bayescancel/model.hpp"
#include "bayescancel/predict.hpp"
#include "bayescancel/sampler.hpp"

namespace bayescancel::io {

inline constexpr const char* kDrawsVersion = "bayescancel-draws v1";
inline constexpr const char* kStatsVersion = "bayescancel-sampler-stats v1";
inline constexpr const char* kSummaryVersion = "bayescancel-summary v1";
inline constexpr const char* kCompareVersion = "bayescancel-compare v1";
inline constexpr const char* kPredictVersion = "bayescancel-predictions v1";
inline constexpr const char* kLogLikMagic = "BCLLBIN1";

/// Full round-trip precision (%.17g).
std::string format_full(double v);

std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t hash_file(const std::string& path);

/// CSV with chain and iteration columns, one row per draw, parameters on the
/// unconstrained scale.
void write_draws_csv(const sampler::SampleSet& samples, const std::string& path);
sampler::SampleSet read_draws_csv(const std::string& path);

void write_sampler_stats_csv(const sampler::SampleSet& samples,
                             const std::string& path);

/// Binary pointwise log-likelihood matrix with a row-identity hash so that
/// comparisons can verify both fits scored the same observations.
void write_loglik_bin(const model::LogLikMatrix& loglik, std::uint64_t row_hash,
                      const std::string& path);
model::LogLikMatrix read_loglik_bin(const std::string& path,
                                    std::uint64_t* row_hash);

/// Fingerprint of the observation set: response, trials and data provenance.
std::uint64_t row_identity_hash(const ingest::DesignMatrix& dm,
                                std::uint64_t data_hash);

void write_summary_text(const diagnostics::SummaryTable& table, std::ostream& out);
void write_summary_csv(const diagnostics::SummaryTable& table, std::ostream& out);
void write_summary_json(const diagnostics::SummaryTable& table, std::ostream& out);

void write_compare_text(const loo::CompareResult& cmp, std::ostream& out);
void write_compare_json(const loo::CompareResult& cmp,
                        const std::vector<std::pair<std::string, loo::LooResult>>& results,
                        std::ostream& out);

void write_predictions_text(const std::vector<predict::PredictionRow>& rows,
                            std::ostream& out);
void write_predictions_csv(const std::vector<predict::PredictionRow>& rows,
                           std::ostream& out);
void write_predictions_json(const std::vector<predict::PredictionRow>& rows,
                            std::ostream& out);

}  // namespace bayescancel::io

#endif
