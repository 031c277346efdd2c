#ifndef BAYESCANCEL_INGEST_HPP
#define BAYESCANCEL_INGEST_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bayescancel::ingest {

/// One booking row; counts are validated nonnegative integers.
struct RawBookingRecord {
  std::string booking_id;
  long number_of_adults = 0;
  long number_of_children = 0;
  long number_of_weekend_nights = 0;
  long number_of_week_nights = 0;
  std::string type_of_meal;
  long car_parking_space = 0;
  std::string room_type;
  long lead_time = 0;
  std::string market_segment_type;
  long repeated = 0;
  long p_c = 0;
  long p_not_c = 0;
  double average_price = 0.0;
  long special_requests = 0;
  std::string date_of_reservation;
  std::string booking_status;
};

struct Dataset {
  std::vector<RawBookingRecord> records;
  std::string source_path;

  std::size_t row_count() const { return records.size(); }
};

struct CategoricalColumn {
  std::string column;
  std::vector<std::string> levels;  // sorted lexicographically
  std::string reference;            // always one of levels
};

/// How raw columns become design-matrix columns. A plan built by
/// make_encoding_plan covers exactly the levels observed; a plan loaded from
/// file is frozen and rejects unseen levels.
struct EncodingPlan {
  std::vector<std::string> numeric_columns;
  std::vector<CategoricalColumn> categorical_columns;
  std::string response_column = "booking.status";
  std::vector<std::string> response_labels;  // observed labels, sorted
  std::string positive_label = "Not_Canceled";
};

/// Row-major N x P matrix with intercept in column 0, plus the response
/// successes y and per-row trial counts.
struct DesignMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> x;  // n_rows * n_cols, row-major
  std::vector<std::string> column_names;
  std::vector<long> y;
  std::vector<long> trials;

  double at(std::size_t i, std::size_t j) const { return x[i * n_cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * n_cols, n_cols);
  }
};

/// The 17 canonical column names, dot-normalized, in Kaggle file order.
const std::vector<std::string>& booking_schema();

/// Predictors fitted by default: the ten numeric counts plus room.type.
const std::vector<std::string>& default_features();

/// Spaces and punctuation become dots: "number of adults" and "P-not-C"
/// normalize to "number.of.adults" and "P.not.C".
std::string normalize_column_name(const std::string& name);

Dataset parse_csv(const std::string& path);
Dataset parse_csv(const std::string& path, const std::vector<std::string>& schema);
Dataset parse_csv_text(const std::string& text, const std::string& origin,
                       const std::vector<std::string>& schema);

/// The schema minus booking.status, for new-booking prediction inputs.
std::vector<std::string> prediction_schema();

/// n distinct rows chosen uniformly without replacement, deterministic for a
/// fixed (seed, n, input order). Output preserves file order.
Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed);

/// Level discovery over the given features: categorical levels sorted
/// lexicographically, reference = first observed level.
EncodingPlan make_encoding_plan(const Dataset& data,
                                const std::vector<std::string>& features,
                                const std::string& positive_label);

DesignMatrix build_design_matrix(const Dataset& data, const EncodingPlan& plan);

/// Predictor rows for new bookings under a frozen plan; no response column
/// is read, y is zero and trials one.
DesignMatrix build_predict_matrix(const Dataset& data, const EncodingPlan& plan);

/// Merges rows with identical predictor vectors: trials add, successes add.
/// Requires trials == 1 on input; first-occurrence order is kept.
DesignMatrix aggregate_trials(const DesignMatrix& dm);

void write_design_matrix_csv(const DesignMatrix& dm, const std::string& path);

void write_encoding_plan(const EncodingPlan& plan, const std::string& path);
EncodingPlan read_encoding_plan(const std::string& path);

bool is_numeric_feature(const std::string& column);
bool is_categorical_feature(const std::string& column);

/// Numeric field lookup by canonical column name.
double numeric_field(const RawBookingRecord& rec, const std::string& column);
const std::string& categorical_field(const RawBookingRecord& rec,
                                     const std::string& column);

}  // namespace bayescancel::ingest

#endif
