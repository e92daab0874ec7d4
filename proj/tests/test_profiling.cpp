#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mrtime/error.hpp"
#include "mrtime/profiling.hpp"
#include "oracles.hpp"

using namespace mrtime;
using namespace mrtime::profiling;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "mrtime_test_profiling";
  std::filesystem::create_directories(dir);
  return dir / name;
}

class ThrowingWorkload : public workloads::Workload {
 public:
  std::string name() const override { return "broken"; }
  double run(const ConfigPoint&, int) override { throw std::runtime_error("disk on fire"); }
};

}  // namespace

TEST_CASE("generate_grid") {
  SUBCASE("singleton lattice") {
    const std::vector<ParamRange> ranges{{"mappers", 1, 1}, {"reducers", 1, 1}};
    CHECK(generate_grid(ranges, 1, 0) == std::vector{ConfigPoint::mappers_reducers(1, 1)});
  }
  SUBCASE("default profile is reproducible and in range") {
    const auto ranges = default_ranges();
    const auto a = generate_grid(ranges, kDefaultGridCount, 42);
    const auto b = generate_grid(ranges, kDefaultGridCount, 42);
    CHECK(a == b);
    CHECK(a.size() == 20);
    CHECK(std::set<ConfigPoint>(a.begin(), a.end()).size() == 20);
    for (const auto& c : a) {
      CHECK(c.mappers() >= 5);
      CHECK(c.mappers() <= 40);
      CHECK(c.reducers() >= 5);
      CHECK(c.reducers() <= 40);
    }
  }
  SUBCASE("exhaustive sample") {
    const std::vector<ParamRange> ranges{{"mappers", 1, 2}, {"reducers", 1, 2}};
    auto g = generate_grid(ranges, 4, 9);
    std::sort(g.begin(), g.end());
    CHECK(g == std::vector{ConfigPoint::mappers_reducers(1, 1), ConfigPoint::mappers_reducers(1, 2),
                           ConfigPoint::mappers_reducers(2, 1), ConfigPoint::mappers_reducers(2, 2)});
  }
  SUBCASE("different seeds give different grids") {
    const auto ranges = default_ranges();
    std::set<std::vector<ConfigPoint>> seen;
    for (std::uint64_t seed = 0; seed < 10; ++seed) seen.insert(generate_grid(ranges, 2, seed));
    CHECK(seen.size() == 10);
  }
  SUBCASE("count beyond the lattice") {
    try {
      generate_grid(default_ranges(), 1297, 1);
      FAIL("expected CountExceedsLattice");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CountExceedsLattice);
      CHECK(std::string(e.what()).find("1296") != std::string::npos);
    }
  }
  SUBCASE("bad ranges") {
    CHECK_THROWS_AS(generate_grid(std::vector<ParamRange>{{"m", 0, 3}}, 1, 0), Error);
    CHECK_THROWS_AS(generate_grid(std::vector<ParamRange>{{"m", 4, 3}}, 1, 0), Error);
    CHECK_THROWS_AS(generate_grid(std::vector<ParamRange>{{"m", 1, 3}}, 0, 0), Error);
  }
  SUBCASE("every lattice point is reachable") {
    const std::vector<ParamRange> ranges{{"mappers", 1, 3}, {"reducers", 1, 3}};
    std::set<ConfigPoint> hit;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
      for (const auto& c : generate_grid(ranges, 2, seed)) hit.insert(c);
    CHECK(hit.size() == 9);
  }
}

TEST_CASE("aggregate_runs") {
  const auto c = ConfigPoint::mappers_reducers(10, 10);
  SUBCASE("mean of five") {
    std::vector<RunSample> s;
    int i = 0;
    for (double t : {9.0, 10.0, 11.0, 10.0, 10.0}) s.push_back({"app", c, i++, t});
    const auto r = aggregate_runs(s);
    REQUIRE(r.size() == 1);
    CHECK(r[0].exec_time_s == doctest::Approx(10.0));
    CHECK(r[0].config == c);
    CHECK(r[0].app == "app");
  }
  SUBCASE("median mode") {
    std::vector<RunSample> s;
    int i = 0;
    for (double t : {9.0, 30.0, 11.0, 10.0, 10.5}) s.push_back({"app", c, i++, t});
    CHECK(aggregate_runs(s, Aggregation::Median)[0].exec_time_s == 10.5);
    s.pop_back();
    CHECK(aggregate_runs(s, Aggregation::Median)[0].exec_time_s == 10.5);
  }
  SUBCASE("single sample per config") {
    std::vector<RunSample> s{{"app", c, 0, 3.25}, {"app", ConfigPoint::mappers_reducers(1, 2), 0, 7.5}};
    const auto r = aggregate_runs(s);
    REQUIRE(r.size() == 2);
    CHECK(r[0].exec_time_s == 3.25);
    CHECK(r[1].exec_time_s == 7.5);
  }
  SUBCASE("20 configs x 5 samples match a group-by") {
    const auto configs = generate_grid(default_ranges(), 20, 3);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(1.0, 50.0);
    std::vector<RunSample> s;
    for (int run = 0; run < 5; ++run)
      for (const auto& cfg : configs) s.push_back({"app", cfg, run, u(gen)});
    std::shuffle(s.begin(), s.end(), gen);
    const auto records = aggregate_runs(s);
    const auto ref = oracle::group_by_mean(s);
    CHECK(records.size() == 20);
    for (const auto& r : records) {
      CHECK(r.exec_time_s == doctest::Approx(ref.at(r.config)).epsilon(1e-14));
      double lo = 1e300, hi = -1e300;
      for (const auto& x : s)
        if (x.config == r.config) {
          lo = std::min(lo, x.exec_time_s);
          hi = std::max(hi, x.exec_time_s);
        }
      CHECK(r.exec_time_s >= lo);
      CHECK(r.exec_time_s <= hi);
    }
  }
  SUBCASE("empty") {
    try {
      aggregate_runs(std::vector<RunSample>{});
      FAIL("expected EmptyInput");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyInput);
    }
  }
}

TEST_CASE("run_plan") {
  workloads::SyntheticTruth truth(oracle::astar_model(), 0.0, 1);
  workloads::SyntheticWorkload synthetic(truth);

  SUBCASE("noise-free single run equals the truth polynomial") {
    ExperimentPlan plan{"synthetic", {ConfigPoint::mappers_reducers(12, 30)}, 1, 0};
    const auto s = run_plan(plan, synthetic);
    REQUIRE(s.size() == 1);
    CHECK(s[0].exec_time_s == doctest::Approx(oracle::eval_poly(oracle::kAStar, 12, 30)).epsilon(1e-14));
  }
  SUBCASE("counts and run indices") {
    ExperimentPlan plan{"synthetic",
                        {ConfigPoint::mappers_reducers(5, 6), ConfigPoint::mappers_reducers(7, 8)}, 5, 0};
    const auto s = run_plan(plan, synthetic);
    REQUIRE(s.size() == 10);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i].run_index == static_cast<int>(i % 5));
      CHECK(s[i].config == plan.configs[i / 5]);
      CHECK(s[i].app == "synthetic");
    }
  }
  SUBCASE("deterministic with noise") {
    workloads::SyntheticWorkload noisy(workloads::SyntheticTruth(oracle::astar_model(), 0.5, 77));
    ExperimentPlan plan{"synthetic", generate_grid(default_ranges(), 6, 2), 3, 0};
    CHECK(run_plan(plan, noisy) == run_plan(plan, noisy));
  }
  SUBCASE("registry lookup and failures") {
    workloads::WorkloadRegistry reg;
    reg.add(std::make_unique<workloads::SyntheticWorkload>(truth));
    reg.add(std::make_unique<ThrowingWorkload>());
    ExperimentPlan plan{"nope", {ConfigPoint::mappers_reducers(5, 5)}, 1, 0};
    try {
      run_plan(plan, reg);
      FAIL("expected UnknownWorkload");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnknownWorkload);
    }
    plan.app = "broken";
    try {
      run_plan(plan, reg);
      FAIL("expected WorkloadFailure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WorkloadFailure);
      CHECK(std::string(e.what()).find("disk on fire") != std::string::npos);
    }
    plan.app = "synthetic";
    CHECK(run_plan(plan, reg).size() == 1);
  }
  SUBCASE("invalid plans") {
    ExperimentPlan dup{"synthetic",
                       {ConfigPoint::mappers_reducers(5, 5), ConfigPoint::mappers_reducers(5, 5)}, 1, 0};
    CHECK_THROWS_AS(run_plan(dup, synthetic), Error);
    ExperimentPlan zero{"synthetic", {ConfigPoint::mappers_reducers(5, 5)}, 0, 0};
    CHECK_THROWS_AS(run_plan(zero, synthetic), Error);
  }
}

TEST_CASE("dataset files") {
  SUBCASE("round trip of 100 seeded samples") {
    std::mt19937_64 gen(100);
    std::uniform_real_distribution<double> u(1e-3, 1e4);
    std::uniform_int_distribution<int> p(1, 64);
    std::vector<RunSample> s;
    for (int i = 0; i < 100; ++i)
      s.push_back({i % 2 ? "wordcount" : "eximparse", ConfigPoint::mappers_reducers(p(gen), p(gen)),
                   i % 5, u(gen)});
    const auto path = temp_file("roundtrip.csv");
    save_dataset(s, path);
    CHECK(load_dataset(path) == s);
  }
  SUBCASE("header only") {
    std::istringstream in("app,mappers,reducers,run,exec_time_s\n");
    CHECK(read_dataset(in).empty());
  }
  SUBCASE("malformed line names its line number") {
    std::istringstream in("app,mappers,reducers,run,exec_time_s\nwc,1,1,0,2.5\na,b,c\n");
    try {
      read_dataset(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("bad values") {
    for (const char* row : {"wc,0,1,0,1.0", "wc,1,1,0,-2", "wc,1,1,-1,1.0", "wc,1,1,0,nan", "wc,x,1,0,1"}) {
      std::istringstream in(std::string("app,mappers,reducers,run,exec_time_s\n") + row + "\n");
      CHECK_THROWS_AS(read_dataset(in), ParseError);
    }
    std::istringstream wrong_header("app,m,r,run,t\n");
    CHECK_THROWS_AS(read_dataset(wrong_header), ParseError);
  }
  SUBCASE("missing file") {
    try {
      load_dataset(temp_file("does_not_exist.csv"));
      FAIL("expected IoError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::IoError);
    }
  }
  SUBCASE("format") {
    std::ostringstream out;
    write_dataset(out, std::vector<RunSample>{{"wc", ConfigPoint::mappers_reducers(3, 4), 2, 0.1}});
    CHECK(out.str() == "app,mappers,reducers,run,exec_time_s\nwc,3,4,2,0.1\n");
  }
}

TEST_CASE("plan files") {
  const auto configs = generate_grid(default_ranges(), 20, 42);
  std::stringstream ss;
  write_plan(ss, configs);
  CHECK(read_plan(ss) == configs);

  std::istringstream bad("mappers,reducers\n5,5\n5\n");
  try {
    read_plan(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("format_double is lossless") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen);
    CHECK(parse_double(format_double(x), 1, "x") == x);
  }
}
