#include <cmath>
#include <vector>

#include "doctest.h"

#include "bayescancel/errors.hpp"
#include "bayescancel/math.hpp"
#include "bayescancel/predict.hpp"
#include "bayescancel/rng.hpp"
#include "test_util.hpp"

using namespace bayescancel;
namespace prd = bayescancel::predict;

namespace {

/// SampleSet with the given coefficient draws (row-major, draws x dim).
sampler::SampleSet draws_of(const std::vector<std::vector<double>>& draws,
                            std::vector<std::string> names) {
  sampler::SampleSet set;
  set.n_chains = 1;
  set.n_iters = static_cast<int>(draws.size());
  set.dim = names.size();
  set.param_names = std::move(names);
  for (const auto& d : draws) {
    set.draws.insert(set.draws.end(), d.begin(), d.end());
  }
  set.stats.resize(set.n_draws());
  return set;
}

ingest::DesignMatrix single_row(std::vector<double> x) {
  ingest::DesignMatrix dm;
  dm.n_rows = 1;
  dm.n_cols = x.size();
  dm.x = std::move(x);
  for (std::size_t j = 0; j < dm.n_cols; ++j) {
    dm.column_names.push_back(j == 0 ? "Intercept" : "x" + std::to_string(j));
  }
  dm.y.assign(1, 0);
  dm.trials.assign(1, 1);
  return dm;
}

}  // namespace

TEST_CASE("posterior_epred basics") {
  // all-zero coefficient draws: every probability is one half
  const sampler::SampleSet zeros =
      draws_of(std::vector<std::vector<double>>(50, {0.0, 0.0}),
               {"Intercept", "x1"});
  const std::vector<double> x = {1.0, 0.7};
  for (double mu : prd::posterior_epred(zeros, x)) CHECK(mu == 0.5);

  // single draw with eta = 4.16
  const sampler::SampleSet one = draws_of({{4.16, 0.0}}, {"Intercept", "x1"});
  const std::vector<double> mu = prd::posterior_epred(one, x);
  REQUIRE(mu.size() == 1);
  CHECK(mu[0] == doctest::Approx(0.9846322944347244).epsilon(1e-12));

  // a log_phi coordinate is ignored
  const sampler::SampleSet bb =
      draws_of({{4.16, 0.0, 2.5}}, {"Intercept", "x1", "log_phi"});
  CHECK(prd::posterior_epred(bb, x)[0] == doctest::Approx(mu[0]).epsilon(1e-15));

  // column mismatch
  const std::vector<double> wrong = {1.0, 0.7, 0.2};
  CHECK_THROWS_AS(prd::posterior_epred(one, wrong), ShapeError);
}

TEST_CASE("epred is monotone in a positive-coefficient covariate") {
  Rng rng(21);
  std::vector<std::vector<double>> draws;
  for (int s = 0; s < 100; ++s) {
    draws.push_back({0.2 * rng.normal(), 0.8 + 0.1 * rng.normal()});
  }
  const sampler::SampleSet set = draws_of(draws, {"Intercept", "x1"});
  const std::vector<double> lo = prd::posterior_epred(set, std::vector<double>{1.0, 0.0});
  const std::vector<double> hi = prd::posterior_epred(set, std::vector<double>{1.0, 1.0});
  for (std::size_t s = 0; s < lo.size(); ++s) CHECK(hi[s] > lo[s]);
}

TEST_CASE("posterior_predict concentration and near-degenerate outcomes") {
  // mu effectively one: all outcomes one
  const sampler::SampleSet sure =
      draws_of(std::vector<std::vector<double>>(200, {40.0}), {"Intercept"});
  const std::vector<int> all_one =
      prd::posterior_predict(sure, std::vector<double>{1.0}, 9);
  for (int y : all_one) CHECK(y == 1);

  // mean of outcomes concentrates around the mean of mu
  Rng rng(5);
  std::vector<std::vector<double>> draws;
  for (int s = 0; s < 4000; ++s) draws.push_back({0.4 + 0.2 * rng.normal()});
  const sampler::SampleSet set = draws_of(draws, {"Intercept"});
  const std::vector<double> mu = prd::posterior_epred(set, std::vector<double>{1.0});
  const std::vector<int> y = prd::posterior_predict(set, std::vector<double>{1.0}, 31);
  const double mu_bar = math::mean(mu);
  double y_bar = 0.0;
  for (int v : y) y_bar += v;
  y_bar /= y.size();
  CHECK(std::abs(y_bar - mu_bar) <
        3.0 * std::sqrt(mu_bar * (1.0 - mu_bar) / 4000.0));

  // determinism
  CHECK(prd::posterior_predict(set, std::vector<double>{1.0}, 31) == y);
}

TEST_CASE("binary prediction rows obey the exact variance identity") {
  Rng rng(77);
  std::vector<std::vector<double>> draws;
  for (int s = 0; s < 4000; ++s) draws.push_back({1.5 + 0.7 * rng.normal()});
  const sampler::SampleSet set = draws_of(draws, {"Intercept"});
  const ingest::DesignMatrix row = single_row({1.0});

  const std::vector<prd::PredictionRow> table =
      prd::prediction_table(set, row, prd::PredictionMode::binary, 12);
  REQUIRE(table.size() == 1);
  const prd::PredictionRow& r = table[0];
  const double s_count = 4000.0;
  CHECK(std::abs(r.est_error * r.est_error -
                 r.estimate * (1.0 - r.estimate) * s_count / (s_count - 1.0)) <=
        1e-12);
  CHECK((r.q2_5 == 0.0 || r.q2_5 == 1.0));
  CHECK((r.q97_5 == 0.0 || r.q97_5 == 1.0));
  CHECK(r.q2_5 <= r.q97_5);

  // identical inputs and seed reproduce the table exactly
  const std::vector<prd::PredictionRow> again =
      prd::prediction_table(set, row, prd::PredictionMode::binary, 12);
  CHECK(again[0].estimate == r.estimate);
  CHECK(again[0].est_error == r.est_error);
}

TEST_CASE("probability mode summarizes mu directly") {
  // degenerate draws: zero estimation error
  const sampler::SampleSet fixed =
      draws_of(std::vector<std::vector<double>>(100, {0.83, -0.2}),
               {"Intercept", "x1"});
  const ingest::DesignMatrix row = single_row({1.0, 0.5});
  const std::vector<prd::PredictionRow> table =
      prd::prediction_table(fixed, row, prd::PredictionMode::probability, 3);
  const double mu = math::sigmoid(0.83 - 0.2 * 0.5);
  CHECK(table[0].estimate == doctest::Approx(mu).epsilon(1e-14));
  CHECK(table[0].est_error == 0.0);
  CHECK(table[0].q2_5 == doctest::Approx(mu));
  CHECK(table[0].q97_5 == doctest::Approx(mu));

  // probability-mode estimates stay strictly inside (0, 1)
  Rng rng(41);
  std::vector<std::vector<double>> spread;
  for (int s = 0; s < 500; ++s) spread.push_back({5.0 + rng.normal()});
  const std::vector<prd::PredictionRow> inside = prd::prediction_table(
      draws_of(spread, {"Intercept"}), single_row({1.0}),
      prd::PredictionMode::probability, 3);
  CHECK(inside[0].estimate > 0.0);
  CHECK(inside[0].estimate < 1.0);
  CHECK(inside[0].q2_5 <= inside[0].q97_5);
}

TEST_CASE("borderline probabilities give the full-width binary interval") {
  Rng rng(4);
  std::vector<std::vector<double>> draws;
  for (int s = 0; s < 4000; ++s) draws.push_back({0.77 + 0.1 * rng.normal()});
  const sampler::SampleSet set = draws_of(draws, {"Intercept"});
  const std::vector<prd::PredictionRow> table = prd::prediction_table(
      set, single_row({1.0}), prd::PredictionMode::binary, 8);
  // mean mu near 0.68: both outcomes well represented
  CHECK(table[0].estimate > 0.5);
  CHECK(table[0].estimate < 0.85);
  CHECK(table[0].q2_5 == 0.0);
  CHECK(table[0].q97_5 == 1.0);
}

TEST_CASE("probability-mode intervals cover the generating mu") {
  // known generator: coefficient draws spread around the truth; intervals
  // from the posterior of mu should cover the true mu for most test points
  Rng rng(99);
  const double true_b0 = 0.3, true_b1 = -0.6;
  int covered = 0;
  const int points = 100;
  for (int t = 0; t < points; ++t) {
    std::vector<std::vector<double>> draws;
    for (int s = 0; s < 400; ++s) {
      draws.push_back({true_b0 + 0.15 * rng.normal(), true_b1 + 0.2 * rng.normal()});
    }
    const sampler::SampleSet set = draws_of(draws, {"Intercept", "x1"});
    const double x = rng.uniform(-2.0, 2.0);
    const double mu_true = math::sigmoid(true_b0 + true_b1 * x);
    const std::vector<prd::PredictionRow> table = prd::prediction_table(
        set, single_row({1.0, x}), prd::PredictionMode::probability, 5);
    if (table[0].q2_5 <= mu_true && mu_true <= table[0].q97_5) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("prediction_table rejects empty input") {
  const sampler::SampleSet set =
      draws_of(std::vector<std::vector<double>>(10, {0.0}), {"Intercept"});
  ingest::DesignMatrix empty;
  empty.n_cols = 1;
  empty.column_names = {"Intercept"};
  CHECK_THROWS_AS(
      prd::prediction_table(set, empty, prd::PredictionMode::binary, 1),
      SizeError);
}
