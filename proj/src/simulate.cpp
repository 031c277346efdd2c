#include "bayescancel/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bayescancel/csv.hpp"
#include "bayescancel/errors.hpp"
#include "bayescancel/ingest.hpp"
#include "bayescancel/math.hpp"
#include "bayescancel/rng.hpp"

namespace bayescancel::simulate {

namespace {

const std::vector<std::string> kDesignColumns = {
    "number.of.adults",      "number.of.children",
    "number.of.weekend.nights", "number.of.week.nights",
    "car.parking.space",     "lead.time",
    "P.C",                   "P.not.C",
    "average.price",         "special.requests",
    "room.typeRoom_Type2",   "room.typeRoom_Type4",
    "room.typeRoom_Type5",   "room.typeRoom_Type6",
    "room.typeRoom_Type7"};

const char* kRoomLevels[6] = {"Room_Type1", "Room_Type2", "Room_Type4",
                              "Room_Type5", "Room_Type6", "Room_Type7"};
const double kRoomWeights[6] = {0.65, 0.08, 0.15, 0.04, 0.05, 0.03};

const char* kMealLevels[3] = {"Meal_Plan_1", "Meal_Plan_2", "Not_Selected"};
const double kMealWeights[3] = {0.75, 0.15, 0.10};

const char* kMarketLevels[3] = {"Online", "Offline", "Corporate"};
const double kMarketWeights[3] = {0.65, 0.25, 0.10};

std::size_t pick_weighted(Rng& rng, const double* weights, std::size_t n) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return n - 1;
}

struct Pattern {
  long adults, children, weekend, week, parking, lead, repeated, p_c, p_not_c;
  double price;
  long special;
  std::size_t room;
  std::size_t meal;
  std::size_t market;
  std::string date;
};

Pattern draw_pattern(Rng& rng) {
  Pattern p;
  p.adults = 1 + static_cast<long>(rng.uniform_int(3));
  p.children = rng.uniform() < 0.8 ? 0 : 1 + static_cast<long>(rng.uniform_int(2));
  p.weekend = static_cast<long>(rng.uniform_int(3));
  p.week = static_cast<long>(rng.uniform_int(6));
  p.parking = rng.bernoulli(0.1);
  p.lead = std::min<long>(365, static_cast<long>(std::floor(rng.exponential() * 45.0)));
  p.repeated = rng.bernoulli(0.05);
  p.p_c = rng.uniform() < 0.92 ? 0 : 1 + static_cast<long>(rng.uniform_int(2));
  p.p_not_c = rng.uniform() < 0.85 ? 0 : 1 + static_cast<long>(rng.uniform_int(3));
  p.price = std::round(rng.uniform(60.0, 180.0) * 100.0) / 100.0;
  p.special = static_cast<long>(rng.uniform_int(4));
  p.room = pick_weighted(rng, kRoomWeights, 6);
  p.meal = pick_weighted(rng, kMealWeights, 3);
  p.market = pick_weighted(rng, kMarketWeights, 3);
  char buf[16];
  std::snprintf(buf, sizeof buf, "2018-%02d-%02d",
                static_cast<int>(rng.uniform_int(12)) + 1,
                static_cast<int>(rng.uniform_int(28)) + 1);
  p.date = buf;
  return p;
}

double linear_predictor(const GeneratorSpec& spec, const Pattern& p) {
  auto slope = [&](std::size_t j) {
    return j < spec.slopes.size() ? spec.slopes[j] : 0.0;
  };
  double eta = spec.intercept;
  eta += slope(0) * static_cast<double>(p.adults);
  eta += slope(1) * static_cast<double>(p.children);
  eta += slope(2) * static_cast<double>(p.weekend);
  eta += slope(3) * static_cast<double>(p.week);
  eta += slope(4) * static_cast<double>(p.parking);
  eta += slope(5) * static_cast<double>(p.lead);
  eta += slope(6) * static_cast<double>(p.p_c);
  eta += slope(7) * static_cast<double>(p.p_not_c);
  eta += slope(8) * p.price;
  eta += slope(9) * static_cast<double>(p.special);
  // room dummies: levels 2, 4, 5, 6, 7 at slope indices 10..14
  if (p.room > 0) eta += slope(9 + p.room);
  return eta;
}

std::string format_price(double price) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", price);
  return buf;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (slopes.size() > kDesignColumns.size()) {
    throw ConfigError("generator: at most " +
                      std::to_string(kDesignColumns.size()) + " slopes, got " +
                      std::to_string(slopes.size()));
  }
  if (trials < 1) throw ConfigError("generator: trials must be >= 1");
  if (family == model::Family::beta_binomial_logit && !(phi > 0.0)) {
    throw ConfigError("generator: phi must be positive");
  }
}

const std::vector<std::string>& generator_design_columns() {
  return kDesignColumns;
}

std::string simulate_csv(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::ostringstream out;
  out << csv::join_row(ingest::booking_schema()) << "\r\n";

  const std::string negative_label =
      spec.positive_label == "Canceled" ? "Not_Canceled" : "Canceled";
  std::size_t booking_counter = 0;
  for (std::size_t g = 0; g < spec.n_patterns; ++g) {
    const Pattern p = draw_pattern(rng);
    const double mu = math::sigmoid(linear_predictor(spec, p));
    double prob = mu;
    if (spec.family == model::Family::beta_binomial_logit) {
      prob = rng.beta(mu * spec.phi, (1.0 - mu) * spec.phi);
    }
    for (long t = 0; t < spec.trials; ++t) {
      const int y = rng.bernoulli(prob);
      char id[24];
      std::snprintf(id, sizeof id, "INN%07zu", ++booking_counter);
      std::vector<std::string> row = {
          id,
          std::to_string(p.adults),
          std::to_string(p.children),
          std::to_string(p.weekend),
          std::to_string(p.week),
          kMealLevels[p.meal],
          std::to_string(p.parking),
          kRoomLevels[p.room],
          std::to_string(p.lead),
          kMarketLevels[p.market],
          std::to_string(p.repeated),
          std::to_string(p.p_c),
          std::to_string(p.p_not_c),
          format_price(p.price),
          std::to_string(p.special),
          p.date,
          y == 1 ? spec.positive_label : negative_label};
      out << csv::join_row(row) << "\r\n";
    }
  }
  return out.str();
}

void write_simulated_csv(const GeneratorSpec& spec, const std::string& csv_path,
                         const std::string& truth_path) {
  const std::string text = simulate_csv(spec);
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + csv_path);
  out << text;
  out.close();

  nlohmann::json truth;
  truth["format_version"] = "bayescancel-truth v1";
  truth["family"] = model::family_name(spec.family);
  truth["intercept"] = spec.intercept;
  nlohmann::json slopes = nlohmann::json::object();
  for (std::size_t j = 0; j < kDesignColumns.size(); ++j) {
    slopes[kDesignColumns[j]] = j < spec.slopes.size() ? spec.slopes[j] : 0.0;
  }
  truth["slopes"] = slopes;
  if (spec.family == model::Family::beta_binomial_logit) truth["phi"] = spec.phi;
  truth["n_patterns"] = spec.n_patterns;
  truth["trials"] = spec.trials;
  truth["seed"] = spec.seed;
  truth["positive_label"] = spec.positive_label;
  std::ofstream tout(truth_path, std::ios::binary);
  if (!tout) throw ParseError("cannot write file: " + truth_path);
  tout << truth.dump(2) << "\n";
}

}  // namespace bayescancel::simulate
