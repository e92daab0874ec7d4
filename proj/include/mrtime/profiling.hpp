#pragma once

// Experiment plans, sequential profiling runs, aggregation of repeated runs,
// and the CSV formats for plans and datasets.
//
// Plan CSV:     mappers,reducers
// Dataset CSV:  app,mappers,reducers,run,exec_time_s
//
// Both are UTF-8 with LF line endings; times are written with 17 significant
// digits so a save/load cycle is exact.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrtime/types.hpp"
#include "mrtime/workloads.hpp"

namespace mrtime::profiling {

inline constexpr int kDefaultRepeats = 5;
inline constexpr std::size_t kDefaultGridCount = 20;

struct ExperimentPlan {
  std::string app;
  std::vector<ConfigPoint> configs;
  int repeats = kDefaultRepeats;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on an empty or duplicated config list or
  /// repeats < 1.
  void validate() const;
};

/// Seeded uniform sample of `count` distinct points of the integer lattice
/// spanned by `ranges`, without replacement. Points are decoded from lattice
/// indices with the first range most significant. Throws CountExceedsLattice
/// or InvalidArgument (bad range, count 0).
std::vector<ConfigPoint> generate_grid(std::span<const ParamRange> ranges, std::size_t count,
                                       std::uint64_t seed);

enum class Aggregation { Mean, Median };

/// One record per distinct (app, config), in order of first appearance.
/// Throws EmptyInput.
std::vector<ExperimentRecord> aggregate_runs(std::span<const RunSample> samples,
                                             Aggregation mode = Aggregation::Mean);

/// Runs every config plan.repeats times, one run at a time, in plan order.
/// A workload exception is rethrown as WorkloadFailure with its message.
std::vector<RunSample> run_plan(const ExperimentPlan& plan, workloads::Workload& workload);

/// Looks up plan.app in the registry; throws UnknownWorkload.
std::vector<RunSample> run_plan(const ExperimentPlan& plan,
                                const workloads::WorkloadRegistry& registry);

/// Shortest decimal form that parses back to the same double, limited to
/// 17 significant digits.
std::string format_double(double value);

void write_dataset(std::ostream& out, std::span<const RunSample> samples);
std::vector<RunSample> read_dataset(std::istream& in);
void save_dataset(std::span<const RunSample> samples, const std::filesystem::path& path);
std::vector<RunSample> load_dataset(const std::filesystem::path& path);

void write_plan(std::ostream& out, std::span<const ConfigPoint> configs);
std::vector<ConfigPoint> read_plan(std::istream& in);
void save_plan(std::span<const ConfigPoint> configs, const std::filesystem::path& path);
std::vector<ConfigPoint> load_plan(const std::filesystem::path& path);

/// Helpers shared with the other CSV readers.
std::vector<std::string> split_csv_line(const std::string& line);
std::int64_t parse_int(const std::string& field, std::size_t line, const char* what);
double parse_double(const std::string& field, std::size_t line, const char* what);

}  // namespace mrtime::profiling
