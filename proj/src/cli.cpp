#include "mrtime/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "mrtime/error.hpp"
#include "mrtime/eximlog.hpp"
#include "mrtime/model_file.hpp"
#include "mrtime/profiling.hpp"
#include "mrtime/regression.hpp"
#include "mrtime/rng.hpp"
#include "mrtime/workloads.hpp"

namespace mrtime::cli {

namespace {

using profiling::Aggregation;

struct GenOptions {
  std::size_t count = profiling::kDefaultGridCount;
  std::int64_t min = 5;
  std::int64_t max = 40;
  std::optional<std::int64_t> mappers_min, mappers_max, reducers_min, reducers_max;
  std::uint64_t seed = 42;
  std::string output;
};

struct ProfileOptions {
  std::string plan;
  std::string workload = workloads::kSynthetic;
  int repeats = profiling::kDefaultRepeats;
  std::string truth;
  std::optional<double> noise_sigma;
  std::optional<std::uint64_t> seed;
  std::string input;
  std::size_t corpus_bytes = std::size_t{1} << 20;
  std::size_t transactions = 1000;
  std::string output;
};

struct FitOptions {
  std::string data;
  int degree = regression::kDefaultDegree;
  std::string agg = "mean";
  std::size_t holdout = 0;
  std::uint64_t seed = 42;
  std::string holdout_out;
  std::string output;
};

struct PredictOptions {
  std::string model;
  std::optional<std::int64_t> mappers, reducers;
  std::string configs;
  bool grid = false;
  std::int64_t min = 5;
  std::int64_t max = 40;
  std::string output;
};

struct EvaluateOptions {
  std::string model;
  std::string data;
  std::string agg = "mean";
  std::string output;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Aggregation parse_agg(const std::string& s) {
  return s == "median" ? Aggregation::Median : Aggregation::Mean;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  return f;
}

// Writes via fn either to `path` or, when empty, to `out`.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty()) {
    fn(out);
    return;
  }
  auto f = open_output(path);
  fn(f);
  f.flush();
  if (!f) throw Error(ErrorKind::IoError, "write to " + path + " failed");
}

int cmd_gen_experiments(const GenOptions& o, std::ostream& out) {
  const std::vector<ParamRange> ranges{
      {kMappers, o.mappers_min.value_or(o.min), o.mappers_max.value_or(o.max)},
      {kReducers, o.reducers_min.value_or(o.min), o.reducers_max.value_or(o.max)}};
  const auto configs = profiling::generate_grid(ranges, o.count, o.seed);
  emit(o.output, out, [&](std::ostream& s) { profiling::write_plan(s, configs); });
  return kExitOk;
}

std::vector<ParamRange> bounding_box(const std::vector<ConfigPoint>& configs) {
  std::vector<ParamRange> box{{kMappers, std::numeric_limits<std::int64_t>::max(), 1},
                              {kReducers, std::numeric_limits<std::int64_t>::max(), 1}};
  for (const auto& c : configs) {
    box[0].min = std::min(box[0].min, c.mappers());
    box[0].max = std::max(box[0].max, c.mappers());
    box[1].min = std::min(box[1].min, c.reducers());
    box[1].max = std::max(box[1].max, c.reducers());
  }
  return box;
}

int cmd_profile(const ProfileOptions& o, std::ostream& out) {
  profiling::ExperimentPlan plan;
  plan.app = o.workload;
  plan.configs = profiling::load_plan(o.plan);
  plan.repeats = o.repeats;
  plan.seed = o.seed.value_or(0);
  if (plan.configs.empty()) throw Error(ErrorKind::EmptyInput, "plan " + o.plan + " has no rows");

  workloads::WorkloadRegistry registry;
  if (o.workload == workloads::kSynthetic) {
    if (o.truth.empty()) throw UsageError("--truth is required for the synthetic workload");
    const auto truth_file = load_model(o.truth);
    const double sigma = o.noise_sigma.value_or(truth_file.noise_sigma.value_or(0.0));
    const std::uint64_t seed = o.seed.value_or(truth_file.seed.value_or(0));
    registry.add(std::make_unique<workloads::SyntheticWorkload>(
        workloads::SyntheticTruth(truth_file.model, sigma, seed, bounding_box(plan.configs))));
  } else if (o.workload == workloads::kWordCount) {
    auto input = o.input.empty() ? workloads::generate_corpus(o.corpus_bytes, o.seed.value_or(0))
                                 : read_file(o.input);
    registry.add(std::make_unique<workloads::WordCountWorkload>(std::move(input)));
  } else if (o.workload == workloads::kEximParse) {
    auto input = o.input.empty() ? eximlog::generate_log(o.transactions, o.seed.value_or(0)).text
                                 : read_file(o.input);
    registry.add(std::make_unique<workloads::EximWorkload>(std::move(input)));
  }

  const auto samples = profiling::run_plan(plan, registry);
  emit(o.output, out, [&](std::ostream& s) { profiling::write_dataset(s, samples); });
  return kExitOk;
}

std::string hint_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InsufficientData:
      return " (hint: profile more distinct configurations or lower --degree)";
    case ErrorKind::RankDeficient:
      return " (hint: spread the configurations over more distinct values of that parameter)";
    default:
      return "";
  }
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
  if (o.degree < 1) throw UsageError("--degree must be >= 1");
  const auto samples = profiling::load_dataset(o.data);
  auto records = profiling::aggregate_runs(samples, parse_agg(o.agg));
  for (const auto& r : records) {
    if (r.app != records.front().app) {
      throw Error(ErrorKind::InvalidArgument, "dataset " + o.data + " mixes apps '" +
                                                  records.front().app + "' and '" + r.app + "'");
    }
  }

  if (o.holdout > 0) {
    if (o.holdout >= records.size()) {
      throw Error(ErrorKind::InsufficientData,
                  "--holdout " + std::to_string(o.holdout) + " leaves no training configurations out of " +
                      std::to_string(records.size()));
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Xoshiro256ss rng(o.seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_below(i)]);
    std::set<ConfigPoint> held;
    for (std::size_t i = 0; i < o.holdout; ++i) held.insert(records[order[i]].config);
    std::erase_if(records, [&](const ExperimentRecord& r) { return held.contains(r.config); });

    if (!o.holdout_out.empty()) {
      std::vector<RunSample> test;
      for (const auto& s : samples)
        if (held.contains(s.config)) test.push_back(s);
      profiling::save_dataset(test, o.holdout_out);
    }
  }

  regression::FitOptions fo;
  fo.degree = o.degree;
  ModelFile file;
  file.model = regression::fit(records, fo);
  file.trained_from = o.data;
  file.m = records.size();
  emit(o.output, out, [&](std::ostream& s) { write_model(s, file); });
  return kExitOk;
}

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const int modes = (o.mappers || o.reducers ? 1 : 0) + (o.configs.empty() ? 0 : 1) + (o.grid ? 1 : 0);
  if (modes != 1) {
    throw UsageError("give exactly one of --mappers/--reducers, --configs or --grid");
  }
  if ((o.mappers.has_value()) != (o.reducers.has_value())) {
    throw UsageError("--mappers and --reducers must be given together");
  }
  const auto model = load_model(o.model).model;

  std::vector<ConfigPoint> configs;
  if (o.mappers) {
    configs.push_back(ConfigPoint::mappers_reducers(*o.mappers, *o.reducers));
  } else if (!o.configs.empty()) {
    configs = profiling::load_plan(o.configs);
  } else {
    if (o.min < 1 || o.max < o.min) throw UsageError("grid needs 1 <= --min <= --max");
    for (std::int64_t m = o.min; m <= o.max; ++m)
      for (std::int64_t r = o.min; r <= o.max; ++r)
        configs.push_back(ConfigPoint::mappers_reducers(m, r));
  }

  std::vector<SurfacePoint> points;
  points.reserve(configs.size());
  for (const auto& c : configs)
    points.push_back({c.mappers(), c.reducers(), regression::predict(model, c)});

  if (!o.grid) {
    emit(o.output, out, [&](std::ostream& s) { write_surface(s, points); });
    return kExitOk;
  }
  const auto best = std::min_element(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.predicted_s < b.predicted_s;
  });
  emit(o.output, out, [&](std::ostream& s) { write_surface(s, points); });
  out << "# argmin mappers=" << best->mappers << " reducers=" << best->reducers
      << " predicted_s=" << profiling::format_double(best->predicted_s) << '\n';
  return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const auto model = load_model(o.model).model;
  const auto samples = profiling::load_dataset(o.data);
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "dataset " + o.data + " has no rows");
  const auto records = profiling::aggregate_runs(samples, parse_agg(o.agg));
  const auto report = regression::error_stats(model, records);
  const double lse = regression::lse(model, records);
  emit(o.output, out, [&](std::ostream& s) { write_report(s, report, lse); });
  if (!o.output.empty()) {
    out << "mean_pct=" << profiling::format_double(report.mean_pct)
        << " variance_pct=" << profiling::format_double(report.variance_pct)
        << " lse=" << profiling::format_double(lse) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model MapReduce execution time as a function of mappers and reducers", "mrtime"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-experiments", "Write a seeded plan of configurations");
  gen_cmd->add_option("--count", gen.count, "Number of distinct configurations")->capture_default_str();
  gen_cmd->add_option("--min", gen.min, "Lower bound for both parameters")->capture_default_str();
  gen_cmd->add_option("--max", gen.max, "Upper bound for both parameters")->capture_default_str();
  gen_cmd->add_option("--mappers-min", gen.mappers_min);
  gen_cmd->add_option("--mappers-max", gen.mappers_max);
  gen_cmd->add_option("--reducers-min", gen.reducers_min);
  gen_cmd->add_option("--reducers-max", gen.reducers_max);
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Plan CSV (default: stdout)");

  ProfileOptions prof;
  auto* prof_cmd = app.add_subcommand("profile", "Run a workload over a plan and record timings");
  prof_cmd->add_option("--plan", prof.plan, "Plan CSV")->required();
  prof_cmd->add_option("--workload", prof.workload)
      ->check(CLI::IsMember({workloads::kSynthetic, workloads::kWordCount, workloads::kEximParse}))
      ->capture_default_str();
  prof_cmd->add_option("--repeats", prof.repeats)->check(CLI::PositiveNumber)->capture_default_str();
  prof_cmd->add_option("--truth", prof.truth, "Model file used as synthetic ground truth");
  prof_cmd->add_option("--noise-sigma", prof.noise_sigma, "Synthetic noise std-dev in seconds")
      ->check(CLI::NonNegativeNumber);
  prof_cmd->add_option("--seed", prof.seed);
  prof_cmd->add_option("--input", prof.input, "Input text/log for wordcount or eximparse");
  prof_cmd->add_option("--corpus-bytes", prof.corpus_bytes, "Generated corpus size when no --input")
      ->capture_default_str();
  prof_cmd->add_option("--transactions", prof.transactions, "Generated log size when no --input")
      ->capture_default_str();
  prof_cmd->add_option("-o,--output", prof.output, "Dataset CSV (default: stdout)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a time model to a dataset");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--degree", fit.degree)->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--agg", fit.agg)->check(CLI::IsMember({"mean", "median"}))->capture_default_str();
  fit_cmd->add_option("--holdout", fit.holdout, "Configurations to hold out before fitting");
  fit_cmd->add_option("--seed", fit.seed, "Seed for the holdout selection")->capture_default_str();
  fit_cmd->add_option("--holdout-out", fit.holdout_out, "Dataset CSV for the held-out runs");
  fit_cmd->add_option("-o,--output", fit.output, "Model file (default: stdout)");

  PredictOptions pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict execution time from a model");
  pred_cmd->add_option("--model", pred.model)->required();
  pred_cmd->add_option("--mappers", pred.mappers);
  pred_cmd->add_option("--reducers", pred.reducers);
  pred_cmd->add_option("--configs", pred.configs, "Plan CSV of configurations");
  pred_cmd->add_flag("--grid", pred.grid, "Evaluate the full mappers x reducers lattice");
  pred_cmd->add_option("--min", pred.min, "Grid lower bound")->capture_default_str();
  pred_cmd->add_option("--max", pred.max, "Grid upper bound")->capture_default_str();
  pred_cmd->add_option("-o,--output", pred.output, "Surface CSV (default: stdout)");

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Report prediction errors on a dataset");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--agg", eval.agg)->check(CLI::IsMember({"mean", "median"}))->capture_default_str();
  eval_cmd->add_option("-o,--output", eval.output, "Report CSV (default: stdout)");

  std::vector<const char*> argv{"mrtime"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "mrtime: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_experiments(gen, out);
    if (*prof_cmd) return cmd_profile(prof, out);
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*eval_cmd) return cmd_evaluate(eval, out);
  } catch (const UsageError& e) {
    err << "mrtime: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "mrtime: " << to_string(e.kind()) << ": " << e.what() << hint_for(e) << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "mrtime: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mrtime::cli
