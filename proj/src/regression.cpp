#include "mrtime/regression.hpp"

#include <algorithm>
#include <cmath>

#include "mrtime/error.hpp"

namespace mrtime::regression {

TimeModel::TimeModel(std::string app, std::vector<std::string> parameter_names, int degree,
                     linalg::Vector coefficients)
    : app_(std::move(app)),
      names_(std::move(parameter_names)),
      degree_(degree),
      coefficients_(std::move(coefficients)) {
  if (degree_ < 1) throw Error(ErrorKind::InvalidArgument, "degree must be >= 1");
  if (names_.empty()) throw Error(ErrorKind::InvalidArgument, "model needs at least one parameter");
  const std::size_t expected = column_count(names_.size(), degree_);
  if (coefficients_.size() != expected) {
    throw Error(ErrorKind::InvalidArgument,
                "model with " + std::to_string(names_.size()) + " parameters and degree " +
                    std::to_string(degree_) + " needs " + std::to_string(expected) +
                    " coefficients, got " + std::to_string(coefficients_.size()));
  }
}

double TimeModel::alpha(std::size_t param, int power) const {
  if (power == 0) return coefficients_[0];
  return coefficients_[1 + param * static_cast<std::size_t>(degree_) +
                       static_cast<std::size_t>(power - 1)];
}

std::size_t column_count(std::size_t parameters, int degree) {
  return 1 + parameters * static_cast<std::size_t>(degree);
}

std::vector<std::string> column_labels(std::span<const std::string> names, int degree) {
  std::vector<std::string> out{"1"};
  for (const auto& n : names) {
    out.push_back(n);
    for (int d = 2; d <= degree; ++d) out.push_back(n + "^" + std::to_string(d));
  }
  return out;
}

std::vector<double> feature_row(const ConfigPoint& config, int degree) {
  std::vector<double> row;
  row.reserve(column_count(config.size(), degree));
  row.push_back(1.0);
  for (const auto& p : config.params()) {
    const double x = static_cast<double>(p.value);
    double power = 1.0;
    for (int d = 1; d <= degree; ++d) {
      power *= x;
      row.push_back(power);
    }
  }
  return row;
}

namespace {

void check_consistent(std::span<const ExperimentRecord> experiments) {
  if (experiments.empty()) throw Error(ErrorKind::EmptyInput, "no experiments");
  const ConfigPoint& first = experiments.front().config;
  for (std::size_t k = 1; k < experiments.size(); ++k) {
    if (!experiments[k].config.same_names(first)) {
      throw Error(ErrorKind::InconsistentParameters,
                  "experiment " + std::to_string(k) + " has parameters " +
                      experiments[k].config.to_string() + ", expected the layout of " +
                      first.to_string());
    }
  }
  for (const auto& e : experiments) {
    if (!(e.exec_time_s > 0.0) || !std::isfinite(e.exec_time_s)) {
      throw Error(ErrorKind::InvalidArgument,
                  "execution time at " + e.config.to_string() + " must be positive and finite");
    }
  }
}

std::pair<DesignMatrix, linalg::Vector> build(std::span<const ExperimentRecord> experiments,
                                              int degree, bool scale_columns) {
  if (degree < 1) throw Error(ErrorKind::InvalidArgument, "degree must be >= 1");
  check_consistent(experiments);
  const auto names = experiments.front().config.names();
  const std::size_t rows = experiments.size();
  const std::size_t cols = column_count(names.size(), degree);

  std::vector<double> data;
  data.reserve(rows * cols);
  std::vector<double> t;
  t.reserve(rows);
  for (const auto& e : experiments) {
    auto row = feature_row(e.config, degree);
    data.insert(data.end(), row.begin(), row.end());
    t.push_back(e.exec_time_s);
  }

  std::vector<double> scale(cols, 1.0);
  if (scale_columns) {
    for (std::size_t c = 1; c < cols; ++c) {
      double m = 0.0;
      for (std::size_t r = 0; r < rows; ++r) m = std::max(m, std::abs(data[r * cols + c]));
      scale[c] = m > 0.0 ? m : 1.0;
    }
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) data[r * cols + c] /= scale[c];
  }

  DesignMatrix dm{linalg::Matrix(rows, cols, std::move(data)), column_labels(names, degree),
                  std::move(scale)};
  return {std::move(dm), linalg::Vector(std::move(t))};
}

void check_model_params(const TimeModel& model, const ConfigPoint& config) {
  const auto& names = model.parameter_names();
  const auto& params = config.params();
  bool ok = names.size() == params.size();
  for (std::size_t i = 0; ok && i < names.size(); ++i) ok = names[i] == params[i].name;
  if (!ok) {
    std::string expected;
    for (const auto& n : names) expected += (expected.empty() ? "" : ",") + n;
    throw Error(ErrorKind::ParameterMismatch,
                "configuration " + config.to_string() + " does not match model parameters (" +
                    expected + ")");
  }
}

}  // namespace

std::pair<DesignMatrix, linalg::Vector> build_design_matrix(
    std::span<const ExperimentRecord> experiments, int degree) {
  return build(experiments, degree, true);
}

TimeModel fit(std::span<const ExperimentRecord> experiments, const FitOptions& options) {
  auto [design, t] = build(experiments, options.degree, options.scale_columns);
  const std::size_t cols = design.matrix.cols();
  if (experiments.size() < cols) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(cols) + " configurations for " +
                    std::to_string(cols) + " coefficients, got " +
                    std::to_string(experiments.size()));
  }

  linalg::Vector scaled;
  try {
    scaled = linalg::solve_least_squares(design.matrix, t);
  } catch (const RankDeficientError& e) {
    throw RankDeficientError(e.column(), "rank deficient: column " + std::to_string(e.column()) +
                                             " (" + design.column_labels[e.column()] +
                                             ") is linearly dependent on earlier columns");
  }

  std::vector<double> coefficients(cols);
  for (std::size_t c = 0; c < cols; ++c) coefficients[c] = scaled[c] / design.scale[c];
  return TimeModel(experiments.front().app, experiments.front().config.names(), options.degree,
                   linalg::Vector(std::move(coefficients)));
}

double predict(const TimeModel& model, const ConfigPoint& config) {
  check_model_params(model, config);
  const auto& a = model.coefficients();
  const int degree = model.degree();
  double total = a[0];
  std::size_t idx = 1;
  for (const auto& p : config.params()) {
    const double x = static_cast<double>(p.value);
    double power = 1.0;
    for (int d = 1; d <= degree; ++d) {
      power *= x;
      total += a[idx++] * power;
    }
  }
  return total;
}

double lse(const TimeModel& model, std::span<const ExperimentRecord> experiments) {
  std::vector<double> residuals;
  residuals.reserve(experiments.size());
  for (const auto& e : experiments) residuals.push_back(e.exec_time_s - predict(model, e.config));
  return linalg::Vector(std::move(residuals)).norm2();
}

ErrorReport error_stats(const TimeModel& model, std::span<const ExperimentRecord> experiments) {
  if (experiments.empty()) throw Error(ErrorKind::EmptyInput, "no experiments to evaluate");
  ErrorReport report;
  report.rows.reserve(experiments.size());
  // Welford running mean/variance.
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (const auto& e : experiments) {
    if (!(e.exec_time_s > 0.0) || !std::isfinite(e.exec_time_s)) {
      throw Error(ErrorKind::InvalidArgument,
                  "actual time at " + e.config.to_string() + " must be positive and finite");
    }
    const double predicted = predict(model, e.config);
    const double pct = 100.0 * std::abs(e.exec_time_s - predicted) / e.exec_time_s;
    report.rows.push_back({e.config, e.exec_time_s, predicted, pct});
    ++n;
    const double delta = pct - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (pct - mean);
  }
  report.mean_pct = mean;
  report.variance_pct = m2 / static_cast<double>(n);
  return report;
}

}  // namespace mrtime::regression
