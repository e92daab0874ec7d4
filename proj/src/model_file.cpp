#include "mrtime/model_file.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "mrtime/error.hpp"
#include "mrtime/profiling.hpp"

namespace mrtime::cli {

using profiling::format_double;
using profiling::parse_double;
using profiling::parse_int;
using profiling::split_csv_line;

namespace {

bool next_line(std::istream& in, std::string& line, std::size_t& number) {
  if (!std::getline(in, line)) return false;
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::uint64_t parse_unsigned(const std::string& field, std::size_t line, const char* what) {
  const auto v = parse_int(field, line, what);
  if (v < 0) throw ParseError(line, std::string(what) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

void write_model(std::ostream& out, const ModelFile& file) {
  const auto& m = file.model;
  out << kModelMagic << '\n';
  out << "app=" << m.app() << '\n';
  out << "params=" << join(m.parameter_names()) << '\n';
  out << "degree=" << m.degree() << '\n';
  out << "coefficients=";
  for (std::size_t i = 0; i < m.coefficients().size(); ++i) {
    out << (i ? "," : "") << format_double(m.coefficients()[i]);
  }
  out << '\n';
  if (file.trained_from) out << "trained_from=" << *file.trained_from << '\n';
  if (file.m) out << "m=" << *file.m << '\n';
  if (file.noise_sigma) out << "noise_sigma=" << format_double(*file.noise_sigma) << '\n';
  if (file.seed) out << "seed=" << *file.seed << '\n';
}

ModelFile read_model(std::istream& in) {
  std::size_t number = 0;
  std::string line;
  if (!next_line(in, line, number) || line != kModelMagic) {
    throw ParseError(1, std::string("expected '") + kModelMagic + "'");
  }

  std::map<std::string, std::pair<std::string, std::size_t>> fields;
  static const std::vector<std::string> known = {"app", "params", "degree", "coefficients",
                                                 "trained_from", "m", "noise_sigma", "seed"};
  while (next_line(in, line, number)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected key=value");
    auto key = line.substr(0, eq);
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(number, "unknown key '" + key + "'");
    }
    if (!fields.try_emplace(key, line.substr(eq + 1), number).second) {
      throw ParseError(number, "duplicate key '" + key + "'");
    }
  }
  auto require = [&](const char* key) -> const std::pair<std::string, std::size_t>& {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(number + 1, std::string("missing key '") + key + "'");
    return it->second;
  };

  const auto& [app, app_line] = require("app");
  const auto& [params_text, params_line] = require("params");
  const auto& [degree_text, degree_line] = require("degree");
  const auto& [coef_text, coef_line] = require("coefficients");

  auto params = split_csv_line(params_text);
  for (const auto& p : params)
    if (p.empty()) throw ParseError(params_line, "empty parameter name");
  const auto degree = parse_int(degree_text, degree_line, "degree");
  if (degree < 1 || degree > 16) throw ParseError(degree_line, "degree must be in 1..16");

  std::vector<double> coefficients;
  for (const auto& c : split_csv_line(coef_text))
    coefficients.push_back(parse_double(c, coef_line, "coefficient"));

  ModelFile file;
  try {
    file.model = regression::TimeModel(app, std::move(params), static_cast<int>(degree),
                                       linalg::Vector(std::move(coefficients)));
  } catch (const Error& e) {
    throw ParseError(coef_line, e.what());
  }
  if (auto it = fields.find("trained_from"); it != fields.end()) file.trained_from = it->second.first;
  if (auto it = fields.find("m"); it != fields.end())
    file.m = parse_unsigned(it->second.first, it->second.second, "m");
  if (auto it = fields.find("noise_sigma"); it != fields.end()) {
    file.noise_sigma = parse_double(it->second.first, it->second.second, "noise_sigma");
    if (*file.noise_sigma < 0.0) throw ParseError(it->second.second, "noise_sigma must be >= 0");
  }
  if (auto it = fields.find("seed"); it != fields.end())
    file.seed = parse_unsigned(it->second.first, it->second.second, "seed");
  return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  write_model(out, file);
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open model file " + path.string());
  return read_model(in);
}

namespace {
constexpr const char* kReportHeader = "mappers,reducers,actual_s,predicted_s,pct_error";
constexpr const char* kSurfaceHeader = "mappers,reducers,predicted_s";
}  // namespace

void write_report(std::ostream& out, const regression::ErrorReport& report, double lse) {
  out << kReportHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.config.mappers() << ',' << r.config.reducers() << ',' << format_double(r.actual_s)
        << ',' << format_double(r.predicted_s) << ',' << format_double(r.pct_error) << '\n';
  }
  out << "# mean_pct=" << format_double(report.mean_pct)
      << ", variance_pct=" << format_double(report.variance_pct)
      << ", lse=" << format_double(lse) << '\n';
}

ReportFile read_report(std::istream& in) {
  std::size_t number = 0;
  std::string line;
  if (!next_line(in, line, number) || line != kReportHeader) {
    throw ParseError(1, std::string("expected header '") + kReportHeader + "'");
  }
  ReportFile file;
  bool summary = false;
  while (next_line(in, line, number)) {
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      // "# mean_pct=<x>, variance_pct=<y>, lse=<z>"
      auto parts = split_csv_line(line.substr(1));
      if (parts.size() != 3) throw ParseError(number, "malformed summary line");
      const char* keys[] = {"mean_pct=", "variance_pct=", "lse="};
      double* targets[] = {&file.report.mean_pct, &file.report.variance_pct, &file.lse};
      for (std::size_t i = 0; i < 3; ++i) {
        auto p = parts[i];
        p.erase(0, p.find_first_not_of(' '));
        if (!p.starts_with(keys[i])) throw ParseError(number, "malformed summary line");
        *targets[i] = parse_double(p.substr(std::string(keys[i]).size()), number, keys[i]);
      }
      summary = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw ParseError(number, "expected 5 fields, got " + std::to_string(f.size()));
    regression::ErrorRow row;
    row.config = ConfigPoint::mappers_reducers(parse_int(f[0], number, "mappers"),
                                               parse_int(f[1], number, "reducers"));
    row.actual_s = parse_double(f[2], number, "actual_s");
    row.predicted_s = parse_double(f[3], number, "predicted_s");
    row.pct_error = parse_double(f[4], number, "pct_error");
    file.report.rows.push_back(std::move(row));
  }
  if (!summary) throw ParseError(number + 1, "missing summary line");
  return file;
}

void write_surface(std::ostream& out, const std::vector<SurfacePoint>& points) {
  out << kSurfaceHeader << '\n';
  for (const auto& p : points)
    out << p.mappers << ',' << p.reducers << ',' << format_double(p.predicted_s) << '\n';
}

std::vector<SurfacePoint> read_surface(std::istream& in) {
  std::size_t number = 0;
  std::string line;
  if (!next_line(in, line, number) || line != kSurfaceHeader) {
    throw ParseError(1, std::string("expected header '") + kSurfaceHeader + "'");
  }
  std::vector<SurfacePoint> out;
  while (next_line(in, line, number)) {
    if (line.empty() || line.starts_with("#")) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw ParseError(number, "expected 3 fields, got " + std::to_string(f.size()));
    out.push_back({parse_int(f[0], number, "mappers"), parse_int(f[1], number, "reducers"),
                   parse_double(f[2], number, "predicted_s")});
  }
  return out;
}

}  // namespace mrtime::cli
