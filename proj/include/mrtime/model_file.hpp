#pragma once

// File formats owned by the command-line tool.
//
// Model file (UTF-8 key=value text, LF line endings):
//
//   mrtime-model v1
//   app=wordcount
//   params=mappers,reducers
//   degree=3
//   coefficients=a0,a11,a12,a13,a21,a22,a23
//   trained_from=train.csv        (optional)
//   m=20                          (optional: number of training configs)
//   noise_sigma=0.4               (optional: synthetic truth only)
//   seed=42                       (optional: synthetic truth only)
//
// Report CSV:   mappers,reducers,actual_s,predicted_s,pct_error
//               ...rows...
//               # mean_pct=<x>, variance_pct=<y>, lse=<z>
//
// Surface CSV:  mappers,reducers,predicted_s

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mrtime/regression.hpp"

namespace mrtime::cli {

inline constexpr const char* kModelMagic = "mrtime-model v1";

struct ModelFile {
  regression::TimeModel model;
  std::optional<std::string> trained_from;
  std::optional<std::uint64_t> m;
  std::optional<double> noise_sigma;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

void write_model(std::ostream& out, const ModelFile& file);
/// Throws ParseError naming the offending line.
ModelFile read_model(std::istream& in);
void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

struct ReportFile {
  regression::ErrorReport report;
  double lse = 0.0;
};

void write_report(std::ostream& out, const regression::ErrorReport& report, double lse);
ReportFile read_report(std::istream& in);

struct SurfacePoint {
  std::int64_t mappers = 0;
  std::int64_t reducers = 0;
  double predicted_s = 0.0;
};

void write_surface(std::ostream& out, const std::vector<SurfacePoint>& points);
std::vector<SurfacePoint> read_surface(std::istream& in);

}  // namespace mrtime::cli
