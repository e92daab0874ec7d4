#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <vector>

namespace mrtime {

inline constexpr const char* kMappers = "mappers";
inline constexpr const char* kReducers = "reducers";

struct Parameter {
  std::string name;
  std::int64_t value = 0;

  friend auto operator<=>(const Parameter&, const Parameter&) = default;
};

/// One configuration point, e.g. (mappers=20, reducers=5). Parameter order is
/// significant and must be consistent across a dataset.
class ConfigPoint {
 public:
  ConfigPoint() = default;
  /// Throws InvalidArgument on empty lists, duplicate names or values < 1.
  explicit ConfigPoint(std::vector<Parameter> params);

  static ConfigPoint mappers_reducers(std::int64_t mappers, std::int64_t reducers);

  const std::vector<Parameter>& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }
  std::vector<std::string> names() const;

  /// Throws InvalidArgument when the parameter is absent.
  std::int64_t value(const std::string& name) const;
  std::int64_t mappers() const { return value(kMappers); }
  std::int64_t reducers() const { return value(kReducers); }

  bool same_names(const ConfigPoint& other) const;
  std::string to_string() const;

  friend auto operator<=>(const ConfigPoint&, const ConfigPoint&) = default;

 private:
  std::vector<Parameter> params_;
};

/// One aggregated experiment: a configuration and its observed total time.
struct ExperimentRecord {
  ConfigPoint config;
  double exec_time_s = 0.0;
  std::string app;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// One timed run of a configuration; several of these aggregate into an
/// ExperimentRecord.
struct RunSample {
  std::string app;
  ConfigPoint config;
  int run_index = 0;
  double exec_time_s = 0.0;

  friend bool operator==(const RunSample&, const RunSample&) = default;
};

/// Inclusive integer range for one configuration parameter.
struct ParamRange {
  std::string name;
  std::int64_t min = 1;
  std::int64_t max = 1;

  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

/// mappers and reducers both in [5, 40].
std::vector<ParamRange> default_ranges();

}  // namespace mrtime
