#include "bayescancel/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "bayescancel/csv.hpp"
#include "bayescancel/errors.hpp"

namespace bayescancel::io {

namespace {

std::string two_decimals(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string ess_display(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

void write_aligned(std::ostream& out,
                   const std::vector<std::vector<std::string>>& cells,
                   std::size_t left_columns) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << "  ";
      if (j < left_columns) {
        out << std::left << std::setw(static_cast<int>(width[j])) << row[j];
      } else {
        out << std::right << std::setw(static_cast<int>(width[j])) << row[j];
      }
    }
    out << "\n";
  }
}

nlohmann::json number_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  return fnv1a(s.data(), s.size());
}

void write_draws_csv(const sampler::SampleSet& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "# " << kDrawsVersion << "\n";
  std::vector<std::string> header = {"chain", "iteration"};
  header.insert(header.end(), samples.param_names.begin(),
                samples.param_names.end());
  out << csv::join_row(header) << "\n";
  for (int c = 0; c < samples.n_chains; ++c) {
    for (int t = 0; t < samples.n_iters; ++t) {
      out << c << ',' << t;
      for (std::size_t d = 0; d < samples.dim; ++d) {
        out << ',' << format_full(samples.value(c, t, d));
      }
      out << "\n";
    }
  }
}

sampler::SampleSet read_draws_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::string version_line;
  std::getline(in, version_line);
  if (version_line.find(kDrawsVersion) == std::string::npos) {
    throw ParseError(path + ": not a draws file (missing version line)");
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  const csv::Table table = csv::parse(rest.str(), path);
  if (table.header.size() < 3 || table.header[0] != "chain" ||
      table.header[1] != "iteration") {
    throw ParseError(path + ": draws header must start with chain,iteration");
  }

  sampler::SampleSet set;
  set.dim = table.header.size() - 2;
  set.param_names.assign(table.header.begin() + 2, table.header.end());
  int max_chain = -1;
  for (const auto& row : table.rows) {
    max_chain = std::max(max_chain, std::stoi(row[0]));
  }
  set.n_chains = max_chain + 1;
  if (set.n_chains <= 0 || table.rows.empty()) {
    throw ParseError(path + ": no draws");
  }
  if (table.rows.size() % set.n_chains != 0) {
    throw ParseError(path + ": ragged chains");
  }
  set.n_iters = static_cast<int>(table.rows.size()) / set.n_chains;
  set.draws.resize(table.rows.size() * set.dim);
  for (const auto& row : table.rows) {
    if (row.size() != set.dim + 2) throw ParseError(path + ": ragged draw row");
    const int c = std::stoi(row[0]);
    const int t = std::stoi(row[1]);
    if (t < 0 || t >= set.n_iters) throw ParseError(path + ": iteration out of range");
    for (std::size_t d = 0; d < set.dim; ++d) {
      set.draws[(static_cast<std::size_t>(c) * set.n_iters + t) * set.dim + d] =
          std::stod(row[d + 2]);
    }
  }
  set.stats.resize(set.n_draws());
  set.config_echo.chains = set.n_chains;
  set.config_echo.sampling_iters = set.n_iters;
  return set;
}

void write_sampler_stats_csv(const sampler::SampleSet& samples,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "# " << kStatsVersion << "\n";
  out << "chain,iteration,accept_stat,tree_depth,divergent,energy,energy_error\n";
  for (int c = 0; c < samples.n_chains; ++c) {
    for (int t = 0; t < samples.n_iters; ++t) {
      const sampler::DrawStats& st = samples.stat(c, t);
      out << c << ',' << t << ',' << format_full(st.accept_stat) << ','
          << st.tree_depth << ',' << (st.divergent ? 1 : 0) << ','
          << format_full(st.energy) << ',' << format_full(st.energy_error)
          << "\n";
    }
  }
}

void write_loglik_bin(const model::LogLikMatrix& loglik, std::uint64_t row_hash,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out.write(kLogLikMagic, 8);
  const std::uint64_t n = loglik.n_obs;
  const std::uint64_t s = loglik.n_draws;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&s), 8);
  out.write(reinterpret_cast<const char*>(&row_hash), 8);
  out.write(reinterpret_cast<const char*>(loglik.values.data()),
            static_cast<std::streamsize>(loglik.values.size() * sizeof(double)));
}

model::LogLikMatrix read_loglik_bin(const std::string& path,
                                    std::uint64_t* row_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kLogLikMagic, 8) != 0) {
    throw ParseError(path + ": not a pointwise log-likelihood file");
  }
  std::uint64_t n = 0, s = 0, hash = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&s), 8);
  in.read(reinterpret_cast<char*>(&hash), 8);
  model::LogLikMatrix loglik;
  loglik.n_obs = n;
  loglik.n_draws = s;
  loglik.values.resize(n * s);
  in.read(reinterpret_cast<char*>(loglik.values.data()),
          static_cast<std::streamsize>(loglik.values.size() * sizeof(double)));
  if (!in) throw ParseError(path + ": truncated log-likelihood file");
  if (row_hash) *row_hash = hash;
  return loglik;
}

std::uint64_t row_identity_hash(const ingest::DesignMatrix& dm,
                                std::uint64_t data_hash) {
  std::uint64_t h = fnv1a(&data_hash, sizeof data_hash);
  const std::uint64_t n = dm.n_rows;
  h ^= fnv1a(&n, sizeof n);
  h = h * 1099511628211ULL ^ fnv1a(dm.y.data(), dm.y.size() * sizeof(long));
  h = h * 1099511628211ULL ^
      fnv1a(dm.trials.data(), dm.trials.size() * sizeof(long));
  return h;
}

void write_summary_text(const diagnostics::SummaryTable& table, std::ostream& out) {
  out << "# " << kSummaryVersion << "\n";
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Variable", "Estimate", "Est.Error", "95% CI Lower",
                   "95% CI Upper", "Rhat", "ESS Bulk", "ESS Tail"});
  for (const auto& row : table.rows) {
    cells.push_back({row.name, two_decimals(row.estimate),
                     two_decimals(row.est_error), two_decimals(row.ci_lower),
                     two_decimals(row.ci_upper), two_decimals(row.rhat),
                     ess_display(row.ess_bulk), ess_display(row.ess_tail)});
  }
  write_aligned(out, cells, 1);
}

void write_summary_csv(const diagnostics::SummaryTable& table, std::ostream& out) {
  out << "# " << kSummaryVersion << "\n";
  out << "variable,estimate,est_error,ci_lower,ci_upper,rhat,ess_bulk,ess_tail\n";
  for (const auto& row : table.rows) {
    out << csv::escape(row.name) << ',' << format_full(row.estimate) << ','
        << format_full(row.est_error) << ',' << format_full(row.ci_lower) << ','
        << format_full(row.ci_upper) << ',' << format_full(row.rhat) << ','
        << format_full(row.ess_bulk) << ',' << format_full(row.ess_tail) << "\n";
  }
}

void write_summary_json(const diagnostics::SummaryTable& table, std::ostream& out) {
  nlohmann::json doc;
  doc["format_version"] = kSummaryVersion;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    doc["rows"].push_back({{"variable", row.name},
                           {"estimate", number_or_null(row.estimate)},
                           {"est_error", number_or_null(row.est_error)},
                           {"ci_lower", number_or_null(row.ci_lower)},
                           {"ci_upper", number_or_null(row.ci_upper)},
                           {"rhat", number_or_null(row.rhat)},
                           {"ess_bulk", number_or_null(row.ess_bulk)},
                           {"ess_tail", number_or_null(row.ess_tail)}});
  }
  doc["warnings"] = table.warnings;
  out << doc.dump(2) << "\n";
}

void write_compare_text(const loo::CompareResult& cmp, std::ostream& out) {
  out << "# " << kCompareVersion << "\n";
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Model", "elpd_diff", "se_diff"});
  for (const auto& row : cmp.rows) {
    char diff[40], se[40];
    std::snprintf(diff, sizeof diff, "%.1f", row.elpd_diff);
    std::snprintf(se, sizeof se, "%.1f", row.se_diff);
    cells.push_back({row.name, diff, se});
  }
  write_aligned(out, cells, 1);
}

void write_compare_json(
    const loo::CompareResult& cmp,
    const std::vector<std::pair<std::string, loo::LooResult>>& results,
    std::ostream& out) {
  nlohmann::json doc;
  doc["format_version"] = kCompareVersion;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : cmp.rows) {
    nlohmann::json entry = {{"model", row.name},
                            {"elpd_diff", number_or_null(row.elpd_diff)},
                            {"se_diff", number_or_null(row.se_diff)},
                            {"elpd_loo", number_or_null(row.elpd_loo)},
                            {"se_elpd", number_or_null(row.se_elpd)}};
    for (const auto& [name, res] : results) {
      if (name == row.name) {
        entry["n_high_pareto_k"] = res.n_high_k;
      }
    }
    doc["rows"].push_back(entry);
  }
  out << doc.dump(2) << "\n";
}

void write_predictions_text(const std::vector<predict::PredictionRow>& rows,
                            std::ostream& out) {
  out << "# " << kPredictVersion << "\n";
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"", "Estimate", "Est.Error", "Q2.5", "Q97.5"});
  char buf[40];
  int index = 0;
  for (const auto& row : rows) {
    std::vector<std::string> line;
    line.push_back(std::to_string(++index));
    std::snprintf(buf, sizeof buf, "%.5f", row.estimate);
    line.push_back(buf);
    std::snprintf(buf, sizeof buf, "%.5f", row.est_error);
    line.push_back(buf);
    std::snprintf(buf, sizeof buf, "%g", row.q2_5);
    line.push_back(buf);
    std::snprintf(buf, sizeof buf, "%g", row.q97_5);
    line.push_back(buf);
    cells.push_back(std::move(line));
  }
  write_aligned(out, cells, 1);
}

void write_predictions_csv(const std::vector<predict::PredictionRow>& rows,
                           std::ostream& out) {
  out << "# " << kPredictVersion << "\n";
  out << "row,estimate,est_error,q2.5,q97.5\n";
  int index = 0;
  for (const auto& row : rows) {
    out << ++index << ',' << format_full(row.estimate) << ','
        << format_full(row.est_error) << ',' << format_full(row.q2_5) << ','
        << format_full(row.q97_5) << "\n";
  }
}

void write_predictions_json(const std::vector<predict::PredictionRow>& rows,
                            std::ostream& out) {
  nlohmann::json doc;
  doc["format_version"] = kPredictVersion;
  doc["rows"] = nlohmann::json::array();
  int index = 0;
  for (const auto& row : rows) {
    doc["rows"].push_back({{"row", ++index},
                           {"estimate", number_or_null(row.estimate)},
                           {"est_error", number_or_null(row.est_error)},
                           {"q2.5", number_or_null(row.q2_5)},
                           {"q97.5", number_or_null(row.q97_5)}});
  }
  out << doc.dump(2) << "\n";
}

}  // namespace bayescancel::io
