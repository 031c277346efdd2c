#include "bayescancel/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bayescancel/csv.hpp"
#include "bayescancel/errors.hpp"
#include "bayescancel/rng.hpp"

namespace bayescancel::ingest {

namespace {

const std::vector<std::string> kSchema = {
    "Booking_ID",
    "number.of.adults",
    "number.of.children",
    "number.of.weekend.nights",
    "number.of.week.nights",
    "type.of.meal",
    "car.parking.space",
    "room.type",
    "lead.time",
    "market.segment.type",
    "repeated",
    "P.C",
    "P.not.C",
    "average.price",
    "special.requests",
    "date.of.reservation",
    "booking.status"};

const std::vector<std::string> kDefaultFeatures = {
    "number.of.adults",     "number.of.children",
    "number.of.weekend.nights", "number.of.week.nights",
    "car.parking.space",    "lead.time",
    "P.C",                  "P.not.C",
    "average.price",        "special.requests",
    "room.type"};

const std::set<std::string> kNumericColumns = {
    "number.of.adults",  "number.of.children", "number.of.weekend.nights",
    "number.of.week.nights", "car.parking.space", "lead.time",
    "repeated",          "P.C",                "P.not.C",
    "average.price",     "special.requests"};

const std::set<std::string> kCategoricalColumns = {
    "type.of.meal", "room.type", "market.segment.type"};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

long parse_count(const std::string& cell, std::size_t row,
                 const std::string& column) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row) + ", column " + column +
                     ": cannot parse integer from '" + cell + "'");
  }
  if (pos != cell.size()) {
    throw ParseError("row " + std::to_string(row) + ", column " + column +
                     ": trailing characters in '" + cell + "'");
  }
  if (value < 0) {
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": count must be nonnegative, got " + cell);
  }
  return value;
}

double parse_price(const std::string& cell, std::size_t row,
                   const std::string& column) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row) + ", column " + column +
                     ": cannot parse number from '" + cell + "'");
  }
  if (pos != cell.size()) {
    throw ParseError("row " + std::to_string(row) + ", column " + column +
                     ": trailing characters in '" + cell + "'");
  }
  if (value < 0.0) {
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": average price must be nonnegative, got " + cell);
  }
  return value;
}

}  // namespace

const std::vector<std::string>& booking_schema() { return kSchema; }

const std::vector<std::string>& default_features() { return kDefaultFeatures; }

std::string normalize_column_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out.push_back(c);
    } else {
      out.push_back('.');
    }
  }
  // trim leading/trailing dots introduced by padding
  while (!out.empty() && out.front() == '.') out.erase(out.begin());
  while (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

bool is_numeric_feature(const std::string& column) {
  return kNumericColumns.count(column) > 0;
}

bool is_categorical_feature(const std::string& column) {
  return kCategoricalColumns.count(column) > 0;
}

double numeric_field(const RawBookingRecord& rec, const std::string& column) {
  if (column == "number.of.adults") return static_cast<double>(rec.number_of_adults);
  if (column == "number.of.children") return static_cast<double>(rec.number_of_children);
  if (column == "number.of.weekend.nights") return static_cast<double>(rec.number_of_weekend_nights);
  if (column == "number.of.week.nights") return static_cast<double>(rec.number_of_week_nights);
  if (column == "car.parking.space") return static_cast<double>(rec.car_parking_space);
  if (column == "lead.time") return static_cast<double>(rec.lead_time);
  if (column == "repeated") return static_cast<double>(rec.repeated);
  if (column == "P.C") return static_cast<double>(rec.p_c);
  if (column == "P.not.C") return static_cast<double>(rec.p_not_c);
  if (column == "average.price") return rec.average_price;
  if (column == "special.requests") return static_cast<double>(rec.special_requests);
  throw SchemaError("not a numeric column: " + column);
}

const std::string& categorical_field(const RawBookingRecord& rec,
                                     const std::string& column) {
  if (column == "type.of.meal") return rec.type_of_meal;
  if (column == "room.type") return rec.room_type;
  if (column == "market.segment.type") return rec.market_segment_type;
  throw SchemaError("not a categorical column: " + column);
}

Dataset parse_csv(const std::string& path) { return parse_csv(path, kSchema); }

std::vector<std::string> prediction_schema() {
  std::vector<std::string> schema;
  for (const auto& c : kSchema) {
    if (c != "booking.status") schema.push_back(c);
  }
  return schema;
}

Dataset parse_csv(const std::string& path, const std::vector<std::string>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset data = parse_csv_text(buf.str(), path, schema);
  data.source_path = path;
  return data;
}

Dataset parse_csv_text(const std::string& text, const std::string& origin,
                       const std::vector<std::string>& schema) {
  const csv::Table table = csv::parse(text, origin);
  if (table.header.empty()) throw SchemaError(origin + ": missing header row");

  // column positions by normalized, case-insensitive name
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    position[lower(normalize_column_name(table.header[j]))] = j;
  }
  std::unordered_map<std::string, std::size_t> column_index;
  for (const std::string& want : schema) {
    auto it = position.find(lower(want));
    if (it == position.end()) {
      throw SchemaError(origin + ": missing column '" + want + "'");
    }
    column_index[want] = it->second;
  }

  Dataset data;
  data.source_path = origin;
  data.records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto cell = [&](const std::string& column) -> const std::string& {
      const std::size_t j = column_index.at(column);
      if (j >= row.size()) {
        throw ParseError(origin + ": row " + std::to_string(r + 1) +
                         " has too few fields");
      }
      const std::string& v = row[j];
      if (v.empty()) {
        throw DataError(origin + ": row " + std::to_string(r + 1) +
                        ", column " + column + ": missing value");
      }
      return v;
    };
    RawBookingRecord rec;
    rec.booking_id = cell("Booking_ID");
    rec.number_of_adults = parse_count(cell("number.of.adults"), r + 1, "number.of.adults");
    rec.number_of_children = parse_count(cell("number.of.children"), r + 1, "number.of.children");
    rec.number_of_weekend_nights =
        parse_count(cell("number.of.weekend.nights"), r + 1, "number.of.weekend.nights");
    rec.number_of_week_nights =
        parse_count(cell("number.of.week.nights"), r + 1, "number.of.week.nights");
    rec.type_of_meal = cell("type.of.meal");
    rec.car_parking_space = parse_count(cell("car.parking.space"), r + 1, "car.parking.space");
    rec.room_type = cell("room.type");
    rec.lead_time = parse_count(cell("lead.time"), r + 1, "lead.time");
    rec.market_segment_type = cell("market.segment.type");
    rec.repeated = parse_count(cell("repeated"), r + 1, "repeated");
    rec.p_c = parse_count(cell("P.C"), r + 1, "P.C");
    rec.p_not_c = parse_count(cell("P.not.C"), r + 1, "P.not.C");
    rec.average_price = parse_price(cell("average.price"), r + 1, "average.price");
    rec.special_requests = parse_count(cell("special.requests"), r + 1, "special.requests");
    rec.date_of_reservation = cell("date.of.reservation");
    if (column_index.count("booking.status") > 0) {
      rec.booking_status = cell("booking.status");
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw SizeError("subsample: n must be positive");
  if (n > data.row_count()) {
    throw SizeError("subsample: requested " + std::to_string(n) + " rows from " +
                    std::to_string(data.row_count()));
  }
  std::vector<std::size_t> idx(data.row_count());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  // partial Fisher-Yates: the first n entries are a uniform sample
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());  // keep file order

  Dataset out;
  out.source_path = data.source_path;
  out.records.reserve(n);
  for (std::size_t i : idx) out.records.push_back(data.records[i]);
  return out;
}

EncodingPlan make_encoding_plan(const Dataset& data,
                                const std::vector<std::string>& features,
                                const std::string& positive_label) {
  EncodingPlan plan;
  for (const std::string& f : features) {
    if (is_numeric_feature(f)) {
      plan.numeric_columns.push_back(f);
    } else if (is_categorical_feature(f)) {
      std::set<std::string> levels;
      for (const auto& rec : data.records) levels.insert(categorical_field(rec, f));
      if (levels.empty()) {
        throw DataError("cannot discover levels for '" + f + "' on empty data");
      }
      CategoricalColumn col;
      col.column = f;
      col.levels.assign(levels.begin(), levels.end());
      col.reference = col.levels.front();
      plan.categorical_columns.push_back(std::move(col));
    } else {
      throw SchemaError("unknown feature column: " + f);
    }
  }
  std::set<std::string> labels;
  for (const auto& rec : data.records) labels.insert(rec.booking_status);
  plan.response_labels.assign(labels.begin(), labels.end());
  if (!labels.empty() && labels.count(positive_label) == 0) {
    throw DataError("positive label '" + positive_label +
                    "' not observed in booking.status");
  }
  plan.positive_label = positive_label;
  return plan;
}

namespace {

DesignMatrix build_matrix_impl(const Dataset& data, const EncodingPlan& plan,
                               bool with_response) {
  DesignMatrix dm;
  dm.column_names.push_back("Intercept");
  for (const auto& c : plan.numeric_columns) dm.column_names.push_back(c);
  for (const auto& cat : plan.categorical_columns) {
    for (const auto& level : cat.levels) {
      if (level == cat.reference) continue;
      dm.column_names.push_back(cat.column + level);
    }
  }
  dm.n_rows = data.row_count();
  dm.n_cols = dm.column_names.size();
  dm.x.assign(dm.n_rows * dm.n_cols, 0.0);
  dm.y.assign(dm.n_rows, 0);
  dm.trials.assign(dm.n_rows, 1);

  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    const RawBookingRecord& rec = data.records[i];
    double* row = dm.x.data() + i * dm.n_cols;
    std::size_t j = 0;
    row[j++] = 1.0;
    for (const auto& c : plan.numeric_columns) row[j++] = numeric_field(rec, c);
    for (const auto& cat : plan.categorical_columns) {
      const std::string& value = categorical_field(rec, cat.column);
      if (std::find(cat.levels.begin(), cat.levels.end(), value) == cat.levels.end()) {
        throw EncodingError("row " + std::to_string(i + 1) + ": level '" + value +
                            "' of " + cat.column + " not in the encoding plan");
      }
      for (const auto& level : cat.levels) {
        if (level == cat.reference) continue;
        row[j++] = (value == level) ? 1.0 : 0.0;
      }
    }
    if (!with_response) continue;
    if (!plan.response_labels.empty() &&
        std::find(plan.response_labels.begin(), plan.response_labels.end(),
                  rec.booking_status) == plan.response_labels.end()) {
      throw DataError("row " + std::to_string(i + 1) + ": response label '" +
                      rec.booking_status + "' not among observed labels");
    }
    dm.y[i] = (rec.booking_status == plan.positive_label) ? 1 : 0;
  }

  if (with_response && dm.n_rows >= 2) {
    for (std::size_t j = 1; j < dm.n_cols; ++j) {
      bool constant = true;
      for (std::size_t i = 1; i < dm.n_rows && constant; ++i) {
        constant = dm.at(i, j) == dm.at(0, j);
      }
      if (constant) {
        throw DataError("column '" + dm.column_names[j] +
                        "' is constant; drop it from the feature list");
      }
    }
  }
  return dm;
}

}  // namespace

DesignMatrix build_design_matrix(const Dataset& data, const EncodingPlan& plan) {
  return build_matrix_impl(data, plan, true);
}

DesignMatrix build_predict_matrix(const Dataset& data, const EncodingPlan& plan) {
  return build_matrix_impl(data, plan, false);
}

DesignMatrix aggregate_trials(const DesignMatrix& dm) {
  for (long t : dm.trials) {
    if (t != 1) throw DataError("aggregate_trials: input must have trials == 1");
  }
  DesignMatrix out;
  out.n_cols = dm.n_cols;
  out.column_names = dm.column_names;

  std::map<std::vector<double>, std::size_t> seen;
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    std::vector<double> key(dm.row(i).begin(), dm.row(i).end());
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), out.n_rows);
      out.x.insert(out.x.end(), dm.row(i).begin(), dm.row(i).end());
      out.y.push_back(dm.y[i]);
      out.trials.push_back(1);
      ++out.n_rows;
    } else {
      out.y[it->second] += dm.y[i];
      out.trials[it->second] += 1;
    }
  }
  return out;
}

void write_design_matrix_csv(const DesignMatrix& dm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "# bayescancel-design v1\n";
  std::vector<std::string> header = dm.column_names;
  header.push_back("y");
  header.push_back("trials");
  out << csv::join_row(header) << "\n";
  char buf[40];
  for (std::size_t i = 0; i < dm.n_rows; ++i) {
    for (std::size_t j = 0; j < dm.n_cols; ++j) {
      if (j > 0) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", dm.at(i, j));
      out << buf;
    }
    out << ',' << dm.y[i] << ',' << dm.trials[i] << "\n";
  }
}

void write_encoding_plan(const EncodingPlan& plan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "# bayescancel-plan v1\n";
  for (const auto& c : plan.numeric_columns) out << "numeric = " << c << "\n";
  for (const auto& cat : plan.categorical_columns) {
    out << "categorical = " << cat.column << "\n";
    for (const auto& level : cat.levels) {
      out << "level " << cat.column << " = " << level << "\n";
    }
    out << "reference " << cat.column << " = " << cat.reference << "\n";
  }
  out << "response = " << plan.response_column << "\n";
  for (const auto& l : plan.response_labels) out << "response.label = " << l << "\n";
  out << "positive.label = " << plan.positive_label << "\n";
}

EncodingPlan read_encoding_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  EncodingPlan plan;
  plan.response_labels.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path + ": bad plan line: " + line);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "numeric") {
      plan.numeric_columns.push_back(value);
    } else if (key == "categorical") {
      CategoricalColumn col;
      col.column = value;
      plan.categorical_columns.push_back(col);
    } else if (key.rfind("level ", 0) == 0) {
      const std::string column = trim(key.substr(6));
      for (auto& cat : plan.categorical_columns) {
        if (cat.column == column) cat.levels.push_back(value);
      }
    } else if (key.rfind("reference ", 0) == 0) {
      const std::string column = trim(key.substr(10));
      for (auto& cat : plan.categorical_columns) {
        if (cat.column == column) cat.reference = value;
      }
    } else if (key == "response") {
      plan.response_column = value;
    } else if (key == "response.label") {
      plan.response_labels.push_back(value);
    } else if (key == "positive.label") {
      plan.positive_label = value;
    } else {
      throw ParseError(path + ": unknown plan key: " + key);
    }
  }
  for (const auto& cat : plan.categorical_columns) {
    if (std::find(cat.levels.begin(), cat.levels.end(), cat.reference) ==
        cat.levels.end()) {
      throw ParseError(path + ": reference level of " + cat.column +
                       " is not in its level list");
    }
  }
  return plan;
}

}  // namespace bayescancel::ingest
