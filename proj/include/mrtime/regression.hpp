#pragma once

// Per-parameter polynomial model of total execution time:
//
//   T = a0 + sum_i sum_{d=1..degree} a_id * p_i^d
//
// fitted by least squares over a set of profiled experiments. There are no
// cross terms between parameters.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrtime/linalg.hpp"
#include "mrtime/types.hpp"

namespace mrtime::regression {

inline constexpr int kDefaultDegree = 3;

struct DesignMatrix {
  linalg::Matrix matrix;                  // scaled: column j divided by scale[j]
  std::vector<std::string> column_labels; // "1", "mappers", "mappers^2", ...
  std::vector<double> scale;              // per-column divisors, scale[0] == 1
};

class TimeModel {
 public:
  TimeModel() = default;
  /// Throws InvalidArgument when the coefficient count is not
  /// 1 + degree * parameter_names.size() or a coefficient is non-finite.
  TimeModel(std::string app, std::vector<std::string> parameter_names, int degree,
            linalg::Vector coefficients);

  const std::string& app() const noexcept { return app_; }
  const std::vector<std::string>& parameter_names() const noexcept { return names_; }
  int degree() const noexcept { return degree_; }
  const linalg::Vector& coefficients() const noexcept { return coefficients_; }

  /// Coefficient of p_param^power (power in 1..degree); alpha(0, 0) is the
  /// intercept.
  double alpha(std::size_t param, int power) const;

  friend bool operator==(const TimeModel&, const TimeModel&) = default;

 private:
  std::string app_;
  std::vector<std::string> names_;
  int degree_ = kDefaultDegree;
  linalg::Vector coefficients_;
};

std::size_t column_count(std::size_t parameters, int degree);

/// Column labels in canonical order for the given parameters.
std::vector<std::string> column_labels(std::span<const std::string> names, int degree);

/// Unscaled feature row [1, p1, p1^2, ..., pN^degree] for one configuration.
std::vector<double> feature_row(const ConfigPoint& config, int degree);

/// Builds the design matrix and observation vector. Columns are divided by
/// their max absolute entry (1 for an all-zero column). Throws
/// InconsistentParameters when records disagree on parameter names/order,
/// EmptyInput on an empty list.
std::pair<DesignMatrix, linalg::Vector> build_design_matrix(
    std::span<const ExperimentRecord> experiments, int degree = kDefaultDegree);

struct FitOptions {
  int degree = kDefaultDegree;
  bool scale_columns = true;
};

/// Least-squares fit. Throws InsufficientData when there are fewer records
/// than columns; RankDeficientError (with the offending column index) when
/// the solver detects dependent columns.
TimeModel fit(std::span<const ExperimentRecord> experiments, const FitOptions& options = {});

/// Throws ParameterMismatch when config names/order differ from the model.
double predict(const TimeModel& model, const ConfigPoint& config);

/// sqrt(sum (actual - predicted)^2) over the records.
double lse(const TimeModel& model, std::span<const ExperimentRecord> experiments);

struct ErrorRow {
  ConfigPoint config;
  double actual_s = 0.0;
  double predicted_s = 0.0;
  double pct_error = 0.0;  // 100 * |actual - predicted| / actual
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double mean_pct = 0.0;
  double variance_pct = 0.0;  // population variance
};

/// Throws EmptyInput on an empty list.
ErrorReport error_stats(const TimeModel& model, std::span<const ExperimentRecord> experiments);

}  // namespace mrtime::regression
