#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bayescancel/config.hpp"
#include "bayescancel/diagnostics.hpp"
#include "bayescancel/errors.hpp"
#include "bayescancel/fit.hpp"
#include "bayescancel/ingest.hpp"
#include "bayescancel/io.hpp"
#include "bayescancel/loo.hpp"
#include "bayescancel/model.hpp"
#include "bayescancel/predict.hpp"
#include "bayescancel/simulate.hpp"

namespace fs = std::filesystem;
using namespace bayescancel;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSampler = 4;
constexpr int kExitCompare = 5;

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void check_format(const std::string& format) {
  if (format != "text" && format != "csv" && format != "json") {
    throw ConfigError("out.format must be text, csv or json");
  }
}

int run_fit(config::RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  check_format(cfg.format);
  if (cfg.data_path.empty()) throw ConfigError("--data is required");
  const model::Family family = model::family_from_name(cfg.family);
  cfg.smp.validate();

  ingest::Dataset data = ingest::parse_csv(cfg.data_path);
  const std::uint64_t data_hash = io::hash_file(cfg.data_path);
  const std::size_t rows_parsed = data.row_count();
  if (cfg.subsample_n > 0) {
    data = ingest::subsample(data, cfg.subsample_n, cfg.subsample_seed);
  }
  if (data.row_count() == 0) throw DataError("no rows to fit");

  const ingest::EncodingPlan plan =
      ingest::make_encoding_plan(data, cfg.features, cfg.positive_label);
  ingest::DesignMatrix dm = ingest::build_design_matrix(data, plan);
  if (cfg.aggregate) dm = ingest::aggregate_trials(dm);

  model::ModelSpec spec;
  spec.family = family;
  spec.priors = cfg.resolve_priors(family);
  spec.n_coef = dm.n_cols;

  FitResult fit = fit_model(spec, dm, cfg.smp);
  print_warnings(fit.warnings);

  const diagnostics::SummaryTable table = diagnostics::summarize(fit.samples);
  print_warnings(table.warnings);

  const model::LogLikMatrix loglik = model::pointwise_log_lik(
      spec, dm, fit.samples.flat_draws(), fit.samples.n_draws());

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  io::write_draws_csv(fit.samples, (out / "draws.csv").string());
  io::write_sampler_stats_csv(fit.samples, (out / "sampler_stats.csv").string());
  ingest::write_encoding_plan(plan, (out / "encoding_plan.cfg").string());
  ingest::write_design_matrix_csv(dm, (out / "design_matrix.csv").string());
  const std::uint64_t row_hash = io::row_identity_hash(dm, data_hash);
  io::write_loglik_bin(loglik, row_hash, (out / "loglik.bin").string());
  {
    std::ofstream s((out / "summary.txt").string(), std::ios::binary);
    io::write_summary_text(table, s);
  }
  {
    std::ofstream s((out / "summary.csv").string(), std::ios::binary);
    io::write_summary_csv(table, s);
  }
  {
    std::ofstream s((out / "summary.json").string(), std::ios::binary);
    io::write_summary_json(table, s);
  }
  const std::map<std::string, std::string> config_map = cfg.to_map();
  config::write_config_echo(config_map, (out / "config.txt").string());

  long n_divergent = 0;
  for (const auto& st : fit.samples.stats) n_divergent += st.divergent;
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json manifest;
  manifest["format_version"] = "bayescancel-manifest v1";
  manifest["command"] = "fit";
  manifest["config"] = config_map;
  manifest["data"] = {{"path", cfg.data_path},
                      {"fnv1a", hex64(data_hash)},
                      {"rows_parsed", rows_parsed},
                      {"rows_used", data.row_count()}};
  manifest["design"] = {{"rows", dm.n_rows},
                        {"cols", dm.n_cols},
                        {"columns", dm.column_names}};
  manifest["model"] = {{"family", model::family_name(family)}};
  manifest["sampler"] = {{"divergent_transitions", n_divergent},
                         {"draws", fit.samples.n_draws()}};
  manifest["row_identity_hash"] = hex64(row_hash);
  manifest["warnings"] = fit.warnings;
  manifest["elapsed_seconds"] = elapsed;
  {
    std::ofstream m((out / "manifest.json").string(), std::ios::binary);
    m << manifest.dump(2) << "\n";
  }

  if (cfg.format == "text") {
    io::write_summary_text(table, std::cout);
  } else if (cfg.format == "csv") {
    io::write_summary_csv(table, std::cout);
  } else {
    io::write_summary_json(table, std::cout);
  }
  std::cerr << "fit written to " << cfg.out_dir << " in " << elapsed << " s\n";
  return 0;
}

int run_summary(const std::string& fit_dir, const std::string& format) {
  check_format(format);
  const sampler::SampleSet samples =
      io::read_draws_csv((fs::path(fit_dir) / "draws.csv").string());
  const diagnostics::SummaryTable table = diagnostics::summarize(samples);
  print_warnings(table.warnings);
  if (format == "text") {
    io::write_summary_text(table, std::cout);
  } else if (format == "csv") {
    io::write_summary_csv(table, std::cout);
  } else {
    io::write_summary_json(table, std::cout);
  }
  return 0;
}

int run_compare(const std::vector<std::string>& fit_dirs,
                const std::string& format, const std::string& out_file) {
  check_format(format);
  std::vector<std::pair<std::string, loo::LooResult>> results;
  std::uint64_t first_hash = 0;
  for (std::size_t i = 0; i < fit_dirs.size(); ++i) {
    const fs::path dir(fit_dirs[i]);
    std::uint64_t row_hash = 0;
    const model::LogLikMatrix loglik =
        io::read_loglik_bin((dir / "loglik.bin").string(), &row_hash);
    if (i == 0) {
      first_hash = row_hash;
    } else if (row_hash != first_hash) {
      throw CompareError("fit '" + fit_dirs[i] +
                         "' was computed on a different observation set");
    }
    std::string name = dir.filename().string();
    if (name.empty()) name = dir.parent_path().filename().string();
    for (const auto& [existing, unused] : results) {
      if (existing == name) {
        name += "#" + std::to_string(i);
        break;
      }
    }
    loo::LooResult res = loo::elpd_loo(loglik);
    print_warnings(res.warnings);
    results.emplace_back(name, std::move(res));
  }

  const loo::CompareResult cmp = loo::compare(results);
  std::ostringstream rendered;
  if (format == "json") {
    io::write_compare_json(cmp, results, rendered);
  } else {
    io::write_compare_text(cmp, rendered);
  }
  std::cout << rendered.str();
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    out << rendered.str();
  }
  return 0;
}

int run_predict(const std::string& fit_dir, config::RunConfig cfg,
                const std::string& out_file) {
  check_format(cfg.format);
  if (cfg.predict_input.empty()) throw ConfigError("--new is required");
  predict::PredictionMode mode;
  if (cfg.predict_mode == "binary") {
    mode = predict::PredictionMode::binary;
  } else if (cfg.predict_mode == "probability") {
    mode = predict::PredictionMode::probability;
  } else {
    throw ConfigError("predict.mode must be binary or probability");
  }

  const fs::path dir(fit_dir);
  const sampler::SampleSet samples =
      io::read_draws_csv((dir / "draws.csv").string());
  const ingest::EncodingPlan plan =
      ingest::read_encoding_plan((dir / "encoding_plan.cfg").string());
  const ingest::Dataset new_data =
      ingest::parse_csv(cfg.predict_input, ingest::prediction_schema());
  if (new_data.row_count() == 0) throw DataError("no rows to predict");
  const ingest::DesignMatrix rows = ingest::build_predict_matrix(new_data, plan);

  const std::vector<predict::PredictionRow> table =
      predict::prediction_table(samples, rows, mode, cfg.predict_seed);

  std::ostringstream rendered;
  if (cfg.format == "text") {
    io::write_predictions_text(table, rendered);
  } else if (cfg.format == "csv") {
    io::write_predictions_csv(table, rendered);
  } else {
    io::write_predictions_json(table, rendered);
  }
  std::cout << rendered.str();
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    out << rendered.str();
  }
  return 0;
}

int run_simulate(const config::RunConfig& cfg, const std::string& family,
                 const std::string& csv_path, std::string truth_path) {
  simulate::GeneratorSpec gen;
  gen.family = model::family_from_name(family);
  gen.intercept = cfg.sim_intercept;
  gen.slopes = cfg.sim_slopes;
  gen.phi = cfg.sim_phi;
  gen.n_patterns = cfg.sim_patterns;
  gen.trials = cfg.sim_trials;
  gen.seed = cfg.sim_seed;
  gen.positive_label = cfg.positive_label;
  gen.validate();
  if (csv_path.empty()) throw ConfigError("--out is required");
  if (truth_path.empty()) truth_path = csv_path + ".truth.json";
  simulate::write_simulated_csv(gen, csv_path, truth_path);
  std::cerr << "wrote " << csv_path << " (" << gen.n_patterns << " patterns x "
            << gen.trials << " trials) and " << truth_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian hotel-booking cancellation models: fit, compare, predict"};
  app.require_subcommand(1);

  config::RunConfig cfg;
  std::string config_path;
  std::string fit_dir;
  std::vector<std::string> compare_dirs;
  std::string compare_out;
  std::string sim_family = "logistic";
  std::string sim_csv;
  std::string sim_truth;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key-value config file");
    cmd->add_option("--format", cfg.format, "output format: text, csv or json");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a model and write run artifacts");
  add_common(fit);
  fit->add_option("--data", cfg.data_path, "booking CSV file");
  fit->add_option("--model", cfg.family, "logistic or beta-binomial");
  fit->add_option("--features", [&cfg](const std::vector<std::string>& vals) {
    cfg.features = config::split_list(vals.back());
    return true;
  }, "comma-separated predictor columns");
  fit->add_option("--positive-label", cfg.positive_label,
                  "booking.status value mapped to y = 1");
  fit->add_option("--subsample-n", cfg.subsample_n, "rows to subsample (0: all)");
  fit->add_option("--subsample-seed", cfg.subsample_seed, "subsample seed");
  fit->add_flag("--aggregate", cfg.aggregate,
                "merge identical predictor rows into (y, n) counts");
  fit->add_option("--chains", cfg.smp.chains, "number of chains");
  fit->add_option("--warmup", cfg.smp.warmup_iters, "warmup iterations");
  fit->add_option("--samples", cfg.smp.sampling_iters, "sampling iterations");
  fit->add_option("--seed", cfg.smp.seed, "sampler seed");
  fit->add_option("--target-accept", cfg.smp.target_accept, "adaptation target");
  fit->add_option("--max-tree-depth", cfg.smp.max_tree_depth, "NUTS depth cap");
  fit->add_option("--init-radius", cfg.smp.init_radius, "init uniform radius");
  fit->add_option("--threads", cfg.smp.max_threads, "parallel chain cap");
  fit->add_option("--prior-intercept-mean", cfg.prior_intercept_mean,
                  "intercept prior mean (default per family)");
  fit->add_option("--prior-intercept-sd", cfg.prior_intercept_sd,
                  "intercept prior sd");
  fit->add_option("--prior-slope-mean", cfg.prior_slope_mean, "slope prior mean");
  fit->add_option("--prior-slope-sd", cfg.prior_slope_sd, "slope prior sd");
  fit->add_option("--prior-phi-shape", cfg.prior_phi_shape,
                  "gamma shape of the precision prior");
  fit->add_option("--prior-phi-rate", cfg.prior_phi_rate,
                  "gamma rate of the precision prior");
  fit->add_option("--out", cfg.out_dir, "output directory");

  CLI::App* summary = app.add_subcommand("summary", "summarize a fit directory");
  add_common(summary);
  summary->add_option("--fit", fit_dir, "fit directory")->required();

  CLI::App* compare = app.add_subcommand("compare", "LOO-CV model comparison");
  add_common(compare);
  compare->add_option("dirs", compare_dirs, "fit directories (two or more)");
  compare->add_option("--out", compare_out, "write the report to this file");

  std::string predict_out;
  CLI::App* predict = app.add_subcommand("predict", "posterior predictions for new bookings");
  add_common(predict);
  predict->add_option("--fit", fit_dir, "fit directory")->required();
  predict->add_option("--new", cfg.predict_input, "CSV of new bookings (no booking.status)");
  predict->add_option("--mode", cfg.predict_mode, "binary or probability");
  predict->add_option("--seed", cfg.predict_seed, "posterior-predictive seed");
  predict->add_option("--out", predict_out, "write the table to this file");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "generate synthetic booking data");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--family", sim_family, "logistic or beta-binomial");
  simulate_cmd->add_option("--intercept", cfg.sim_intercept, "true intercept");
  simulate_cmd->add_option("--slopes", [&cfg](const std::vector<std::string>& vals) {
    cfg.sim_slopes = config::split_doubles(vals.back());
    return true;
  }, "true slopes, comma-separated, design-column order");
  simulate_cmd->add_option("--phi", cfg.sim_phi, "beta-binomial precision");
  simulate_cmd->add_option("--patterns", cfg.sim_patterns, "covariate patterns");
  simulate_cmd->add_option("--trials", cfg.sim_trials, "bookings per pattern");
  simulate_cmd->add_option("--seed", cfg.sim_seed, "generator seed");
  simulate_cmd->add_option("--positive-label", cfg.positive_label,
                           "label written for y = 1");
  simulate_cmd->add_option("--out", sim_csv, "output CSV path");
  simulate_cmd->add_option("--truth", sim_truth, "output truth JSON path");

  // a config file provides defaults; flags override it
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    }
  }
  try {
    if (!config_path.empty()) {
      config::apply_config_map(cfg, config::read_config_file(config_path));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit->parsed()) return run_fit(cfg);
    if (summary->parsed()) return run_summary(fit_dir, cfg.format);
    if (compare->parsed()) {
      if (compare_dirs.size() < 2) {
        std::cerr << "error: compare needs at least two fit directories\n";
        return kExitUsage;
      }
      return run_compare(compare_dirs, cfg.format, compare_out);
    }
    if (predict->parsed()) return run_predict(fit_dir, cfg, predict_out);
    if (simulate_cmd->parsed()) return run_simulate(cfg, sim_family, sim_csv, sim_truth);
    std::cerr << "error: no command given\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SamplerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampler;
  } catch (const CompareError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompare;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
