#include "mrtime/profiling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_set>

#include "mrtime/error.hpp"
#include "mrtime/rng.hpp"

namespace mrtime::profiling {

void ExperimentPlan::validate() const {
  if (configs.empty()) throw Error(ErrorKind::InvalidArgument, "plan has no configurations");
  if (repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats must be >= 1");
  std::set<ConfigPoint> seen;
  for (const auto& c : configs) {
    if (!seen.insert(c).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate configuration " + c.to_string());
    }
  }
}

std::vector<ConfigPoint> generate_grid(std::span<const ParamRange> ranges, std::size_t count,
                                       std::uint64_t seed) {
  if (ranges.empty()) throw Error(ErrorKind::InvalidArgument, "no parameter ranges");
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");

  constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
  std::uint64_t lattice = 1;
  std::vector<std::uint64_t> extent;
  for (const auto& r : ranges) {
    if (r.min < 1 || r.max < r.min) {
      throw Error(ErrorKind::InvalidArgument,
                  "invalid range for " + r.name + ": [" + std::to_string(r.min) + ", " +
                      std::to_string(r.max) + "]");
    }
    const auto e = static_cast<std::uint64_t>(r.max - r.min) + 1;
    extent.push_back(e);
    lattice = (lattice > kCap / e) ? kCap : lattice * e;
  }
  if (count > lattice) {
    throw Error(ErrorKind::CountExceedsLattice,
                "count " + std::to_string(count) + " exceeds the " + std::to_string(lattice) +
                    " distinct lattice points");
  }

  // Floyd's sampling of distinct indices, then a Fisher-Yates shuffle so the
  // emitted order is uniform as well.
  Xoshiro256ss rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> picks;
  picks.reserve(count);
  for (std::uint64_t j = lattice - count; j < lattice; ++j) {
    const std::uint64_t t = rng.uniform_below(j + 1);
    const std::uint64_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    picks.push_back(pick);
  }
  for (std::size_t i = picks.size(); i > 1; --i) {
    std::swap(picks[i - 1], picks[rng.uniform_below(i)]);
  }

  std::vector<ConfigPoint> out;
  out.reserve(count);
  for (std::uint64_t idx : picks) {
    std::vector<Parameter> params(ranges.size());
    for (std::size_t k = ranges.size(); k-- > 0;) {
      params[k] = {ranges[k].name, ranges[k].min + static_cast<std::int64_t>(idx % extent[k])};
      idx /= extent[k];
    }
    out.emplace_back(std::move(params));
  }
  return out;
}

std::vector<ExperimentRecord> aggregate_runs(std::span<const RunSample> samples,
                                             Aggregation mode) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "no run samples to aggregate");
  std::map<std::pair<std::string, ConfigPoint>, std::size_t> index;
  std::vector<std::pair<const RunSample*, std::vector<double>>> groups;
  for (const auto& s : samples) {
    auto [it, inserted] = index.try_emplace({s.app, s.config}, groups.size());
    if (inserted) groups.push_back({&s, {}});
    groups[it->second].second.push_back(s.exec_time_s);
  }

  std::vector<ExperimentRecord> out;
  out.reserve(groups.size());
  for (auto& [first, times] : groups) {
    double value = 0.0;
    if (mode == Aggregation::Mean) {
      for (double t : times) value += t;
      value /= static_cast<double>(times.size());
    } else {
      std::sort(times.begin(), times.end());
      const std::size_t n = times.size();
      value = n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    }
    out.push_back({first->config, value, first->app});
  }
  return out;
}

std::vector<RunSample> run_plan(const ExperimentPlan& plan, workloads::Workload& workload) {
  plan.validate();
  std::vector<RunSample> out;
  out.reserve(plan.configs.size() * static_cast<std::size_t>(plan.repeats));
  for (const auto& config : plan.configs) {
    for (int run = 0; run < plan.repeats; ++run) {
      double t = 0.0;
      try {
        t = workload.run(config, run);
      } catch (const std::exception& e) {
        throw Error(ErrorKind::WorkloadFailure, "workload '" + workload.name() + "' failed at " +
                                                    config.to_string() + " run " +
                                                    std::to_string(run) + ": " + e.what());
      }
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorKind::WorkloadFailure, "workload '" + workload.name() +
                                                    "' reported a non-positive time at " +
                                                    config.to_string());
      }
      out.push_back({plan.app, config, run, t});
    }
  }
  return out;
}

std::vector<RunSample> run_plan(const ExperimentPlan& plan,
                                const workloads::WorkloadRegistry& registry) {
  return run_plan(plan, registry.get(plan.app));
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_int(const std::string& field, std::size_t line, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + field + "'");
  }
  return v;
}

double parse_double(const std::string& field, std::size_t line, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() ||
      !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + what + " '" + field + "'");
  }
  return v;
}

namespace {

constexpr const char* kDatasetHeader = "app,mappers,reducers,run,exec_time_s";
constexpr const char* kPlanHeader = "mappers,reducers";

// Reads lines, stripping a trailing CR; returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& number) {
  if (!std::getline(in, line)) return false;
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::istream& in, std::size_t& number, const char* header) {
  std::string line;
  if (!next_line(in, line, number)) throw ParseError(1, "missing header");
  if (line != header) {
    throw ParseError(number, "expected header '" + std::string(header) + "', got '" + line + "'");
  }
}

ConfigPoint config_at(std::int64_t mappers, std::int64_t reducers, std::size_t line) {
  if (mappers < 1 || reducers < 1) throw ParseError(line, "mappers and reducers must be >= 1");
  return ConfigPoint::mappers_reducers(mappers, reducers);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

}  // namespace

void write_dataset(std::ostream& out, std::span<const RunSample> samples) {
  out << kDatasetHeader << '\n';
  for (const auto& s : samples) {
    if (s.app.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "app name '" + s.app + "' cannot be stored in CSV");
    }
    out << s.app << ',' << s.config.mappers() << ',' << s.config.reducers() << ',' << s.run_index
        << ',' << format_double(s.exec_time_s) << '\n';
  }
}

std::vector<RunSample> read_dataset(std::istream& in) {
  std::size_t number = 0;
  expect_header(in, number, kDatasetHeader);
  std::vector<RunSample> out;
  std::string line;
  while (next_line(in, line, number)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw ParseError(number, "expected 5 fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty()) throw ParseError(number, "empty app name");
    RunSample s;
    s.app = f[0];
    s.config = config_at(parse_int(f[1], number, "mappers"), parse_int(f[2], number, "reducers"),
                         number);
    const auto run = parse_int(f[3], number, "run index");
    if (run < 0 || run > INT32_MAX) throw ParseError(number, "run index out of range");
    s.run_index = static_cast<int>(run);
    s.exec_time_s = parse_double(f[4], number, "exec_time_s");
    if (!(s.exec_time_s > 0.0)) throw ParseError(number, "exec_time_s must be positive");
    out.push_back(std::move(s));
  }
  return out;
}

void save_dataset(std::span<const RunSample> samples, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_dataset(out, samples);
  finish(out, path);
}

std::vector<RunSample> load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void write_plan(std::ostream& out, std::span<const ConfigPoint> configs) {
  out << kPlanHeader << '\n';
  for (const auto& c : configs) out << c.mappers() << ',' << c.reducers() << '\n';
}

std::vector<ConfigPoint> read_plan(std::istream& in) {
  std::size_t number = 0;
  expect_header(in, number, kPlanHeader);
  std::vector<ConfigPoint> out;
  std::string line;
  while (next_line(in, line, number)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) {
      throw ParseError(number, "expected 2 fields, got " + std::to_string(f.size()));
    }
    out.push_back(config_at(parse_int(f[0], number, "mappers"),
                            parse_int(f[1], number, "reducers"), number));
  }
  return out;
}

void save_plan(std::span<const ConfigPoint> configs, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_plan(out, configs);
  finish(out, path);
}

std::vector<ConfigPoint> load_plan(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_plan(in);
}

}  // namespace mrtime::profiling
