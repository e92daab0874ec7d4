#include "mrtime/workloads.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "mrtime/error.hpp"
#include "mrtime/eximlog.hpp"
#include "mrtime/rng.hpp"

namespace mrtime::workloads {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t partition_for(std::string_view key, std::int64_t reducers) {
  return static_cast<std::size_t>(fnv1a64(key) % static_cast<std::uint64_t>(reducers));
}

std::vector<std::string> split_input(std::string_view input, std::int64_t mappers) {
  if (mappers < 1) throw Error(ErrorKind::InvalidArgument, "mappers must be >= 1");
  std::vector<std::size_t> line_ends;  // one past each line, including its LF
  for (std::size_t i = 0; i < input.size(); ++i)
    if (input[i] == '\n') line_ends.push_back(i + 1);
  if (!input.empty() && input.back() != '\n') line_ends.push_back(input.size());

  const auto n = static_cast<std::size_t>(mappers);
  const std::size_t lines = line_ends.size();
  const std::size_t base = lines / n;
  const std::size_t extra = lines % n;

  std::vector<std::string> chunks;
  chunks.reserve(n);
  std::size_t line = 0;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < n; ++c) {
    line += base + (c < extra ? 1 : 0);
    const std::size_t end = line == 0 ? 0 : line_ends[line - 1];
    chunks.emplace_back(input.substr(offset, end - offset));
    offset = end;
  }
  return chunks;
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn(0..n-1) on at most hardware_concurrency threads. The first
// exception thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(n, hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_spec(const JobSpec& spec, const char* app) {
  if (spec.app != app) {
    throw Error(ErrorKind::InvalidArgument,
                "job spec for '" + spec.app + "' passed to the " + app + " job");
  }
  if (spec.mappers < 1 || spec.reducers < 1) {
    throw Error(ErrorKind::InvalidArgument, "mappers and reducers must be >= 1");
  }
}

template <typename LineFn>
void for_each_line(std::string_view chunk, LineFn&& fn) {
  std::size_t start = 0;
  while (start < chunk.size()) {
    std::size_t end = chunk.find('\n', start);
    if (end == std::string_view::npos) end = chunk.size();
    fn(chunk.substr(start, end - start));
    start = end + 1;
  }
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Output of the map phase, partitioned: partitions[mapper][reducer].
struct MapOutput {
  std::vector<std::vector<std::vector<KeyValue>>> partitions;
  std::size_t emitted = 0;
};

// Split + map. map_fn(chunk, emit) is called once per mapper; emit routes a
// pair to its reducer partition.
template <typename MapFn>
MapOutput map_phase(const JobSpec& spec, MapFn&& map_fn) {
  const auto chunks = split_input(spec.input, spec.mappers);
  const auto reducers = static_cast<std::size_t>(spec.reducers);
  MapOutput out;
  out.partitions.assign(chunks.size(), std::vector<std::vector<KeyValue>>(reducers));
  parallel_for(chunks.size(), [&](std::size_t m) {
    auto& buckets = out.partitions[m];
    map_fn(m, std::string_view(chunks[m]), [&](KeyValue kv) {
      const auto r = partition_for(kv.key, spec.reducers);
      buckets[r].push_back(std::move(kv));
    });
  });
  for (const auto& per_mapper : out.partitions)
    for (const auto& b : per_mapper) out.emitted += b.size();
  return out;
}

// Shuffle: reducer r receives mapper 0's pairs for r, then mapper 1's, ...
// This fixed order makes reducer input independent of thread interleaving.
std::vector<std::vector<KeyValue>> shuffle(MapOutput& mapped, std::size_t reducers) {
  std::vector<std::vector<KeyValue>> inputs(reducers);
  for (auto& per_mapper : mapped.partitions) {
    for (std::size_t r = 0; r < reducers; ++r) {
      auto& src = per_mapper[r];
      inputs[r].insert(inputs[r].end(), std::make_move_iterator(src.begin()),
                       std::make_move_iterator(src.end()));
      src.clear();
    }
  }
  return inputs;
}

RunSample timing_sample(const JobSpec& spec, Clock::time_point start) {
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  return RunSample{spec.app, ConfigPoint::mappers_reducers(spec.mappers, spec.reducers), 0,
                   std::max(elapsed, kMinSyntheticTime)};
}

}  // namespace

WordCountResult run_wordcount(const JobSpec& spec) {
  check_spec(spec, kWordCount);
  const auto start = Clock::now();

  auto mapped = map_phase(spec, [](std::size_t, std::string_view chunk, auto&& emit) {
    std::size_t i = 0;
    while (i < chunk.size()) {
      while (i < chunk.size() && is_ascii_space(chunk[i])) ++i;
      const std::size_t begin = i;
      while (i < chunk.size() && !is_ascii_space(chunk[i])) ++i;
      if (i > begin) emit(KeyValue{std::string(chunk.substr(begin, i - begin)), "1"});
    }
  });

  WordCountResult result;
  result.shuffle.pairs_emitted = mapped.emitted;
  const auto reducers = static_cast<std::size_t>(spec.reducers);
  auto inputs = shuffle(mapped, reducers);

  std::vector<std::map<std::string, std::uint64_t>> partial(reducers);
  std::vector<std::size_t> consumed(reducers, 0);
  parallel_for(reducers, [&](std::size_t r) {
    for (auto& kv : inputs[r]) {
      partial[r][std::move(kv.key)] += std::stoull(kv.value);
      ++consumed[r];
    }
  });
  for (std::size_t r = 0; r < reducers; ++r) {
    result.shuffle.pairs_consumed += consumed[r];
    result.counts.merge(partial[r]);
  }
  result.timing = timing_sample(spec, start);
  return result;
}

EximJobResult run_exim_job(const JobSpec& spec) {
  check_spec(spec, kEximParse);
  const auto start = Clock::now();

  std::vector<std::size_t> skipped(static_cast<std::size_t>(spec.mappers), 0);
  auto mapped = map_phase(spec, [&](std::size_t m, std::string_view chunk, auto&& emit) {
    for_each_line(chunk, [&](std::string_view line) {
      auto parsed = eximlog::parse_line(line);
      if (parsed.message_id) {
        emit(KeyValue{std::move(*parsed.message_id), std::move(parsed.raw)});
      } else {
        ++skipped[m];
      }
    });
  });

  EximJobResult result;
  result.shuffle.pairs_emitted = mapped.emitted;
  for (auto s : skipped) result.skipped_lines += s;
  const auto reducers = static_cast<std::size_t>(spec.reducers);
  auto inputs = shuffle(mapped, reducers);

  std::vector<std::map<std::string, std::vector<std::string>>> partial(reducers);
  std::vector<std::size_t> consumed(reducers, 0);
  parallel_for(reducers, [&](std::size_t r) {
    for (auto& kv : inputs[r]) {
      partial[r][std::move(kv.key)].push_back(std::move(kv.value));
      ++consumed[r];
    }
  });
  for (std::size_t r = 0; r < reducers; ++r) {
    result.shuffle.pairs_consumed += consumed[r];
    result.transactions.merge(partial[r]);
  }
  result.timing = timing_sample(spec, start);
  return result;
}

std::string generate_corpus(std::size_t bytes, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 16> syllables = {
      "ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pa", "do", "gri", "sh", "en", "ul", "or"};
  Xoshiro256ss rng(seed);

  std::vector<std::string> vocab(2000);
  for (auto& w : vocab) {
    const auto parts = 1 + rng.uniform_below(4);
    for (std::uint64_t i = 0; i < parts; ++i) w += syllables[rng.uniform_below(syllables.size())];
    if (rng.uniform_below(10) == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  }

  std::string out;
  out.reserve(bytes + 128);
  while (out.size() < bytes) {
    const auto words = 4 + rng.uniform_below(13);
    for (std::uint64_t i = 0; i < words; ++i) {
      if (i) out += rng.uniform_below(20) == 0 ? "\t" : " ";
      // Cubing a uniform draw skews toward low indices, roughly Zipf-like.
      const double u = rng.uniform01();
      out += vocab[static_cast<std::size_t>(static_cast<double>(vocab.size()) * u * u * u)];
    }
    out += '\n';
  }
  return out;
}

namespace {

// Calls fn(config) for every point of the integer lattice spanned by ranges.
template <typename Fn>
void for_each_lattice_point(const std::vector<ParamRange>& ranges, Fn&& fn) {
  std::vector<Parameter> current;
  for (const auto& r : ranges) current.push_back({r.name, r.min});
  for (;;) {
    fn(ConfigPoint(current));
    std::size_t i = ranges.size();
    while (i-- > 0) {
      if (current[i].value < ranges[i].max) {
        ++current[i].value;
        break;
      }
      current[i].value = ranges[i].min;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

SyntheticTruth::SyntheticTruth(regression::TimeModel model, double noise_sigma,
                               std::uint64_t seed, std::vector<ParamRange> ranges)
    : model_(std::move(model)), noise_sigma_(noise_sigma), seed_(seed), ranges_(std::move(ranges)) {
  const std::vector<std::string> expected{kMappers, kReducers};
  if (model_.parameter_names() != expected) {
    throw Error(ErrorKind::InvalidArgument, "synthetic truth must be a model over (mappers, reducers)");
  }
  if (!(noise_sigma_ >= 0.0) || !std::isfinite(noise_sigma_)) {
    throw Error(ErrorKind::InvalidArgument, "noise_sigma must be finite and >= 0");
  }
  if (ranges_.size() != expected.size()) {
    throw Error(ErrorKind::InvalidArgument, "synthetic truth needs a range for mappers and reducers");
  }
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto& r = ranges_[i];
    if (r.name != expected[i] || r.min < 1 || r.max < r.min) {
      throw Error(ErrorKind::InvalidArgument, "invalid range for " + r.name);
    }
  }
  for_each_lattice_point(ranges_, [&](const ConfigPoint& c) {
    const double v = regression::predict(model_, c);
    if (!(v > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "truth polynomial is not positive at " +
                                                  c.to_string() + " (value " + std::to_string(v) +
                                                  ")");
    }
  });
}

double SyntheticTruth::lattice_mean() const {
  double sum = 0.0;
  std::size_t n = 0;
  for_each_lattice_point(ranges_, [&](const ConfigPoint& c) {
    sum += regression::predict(model_, c);
    ++n;
  });
  return sum / static_cast<double>(n);
}

double synthetic_time(const SyntheticTruth& truth, const ConfigPoint& config, int run_index) {
  double value = regression::predict(truth.model(), config);
  if (truth.noise_sigma() > 0.0) {
    std::uint64_t key = mix_key({truth.seed(), static_cast<std::uint64_t>(run_index)});
    for (const auto& p : config.params()) key = mix_key({key, static_cast<std::uint64_t>(p.value)});
    Xoshiro256ss rng(key);
    value += truth.noise_sigma() * rng.normal();
  }
  return std::max(value, kMinSyntheticTime);
}

double SyntheticWorkload::run(const ConfigPoint& config, int run_index) {
  return synthetic_time(truth_, config, run_index);
}

double WordCountWorkload::run(const ConfigPoint& config, int /*run_index*/) {
  return run_wordcount({kWordCount, config.mappers(), config.reducers(), input_})
      .timing.exec_time_s;
}

double EximWorkload::run(const ConfigPoint& config, int /*run_index*/) {
  return run_exim_job({kEximParse, config.mappers(), config.reducers(), input_})
      .timing.exec_time_s;
}

void WorkloadRegistry::add(std::unique_ptr<Workload> workload) {
  auto name = workload->name();
  workloads_[name] = std::move(workload);
}

bool WorkloadRegistry::contains(const std::string& name) const {
  return workloads_.contains(name);
}

Workload& WorkloadRegistry::get(const std::string& name) const {
  auto it = workloads_.find(name);
  if (it == workloads_.end()) {
    throw Error(ErrorKind::UnknownWorkload, "unknown workload '" + name + "'");
  }
  return *it->second;
}

}  // namespace mrtime::workloads
