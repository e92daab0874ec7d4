#pragma once

// Desk-scale workloads: a small in-process map/shuffle/reduce engine with
// WordCount and Exim-mainlog jobs, and a seeded synthetic timer that stands
// in for a cluster when exact ground truth is needed.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mrtime/regression.hpp"
#include "mrtime/types.hpp"

namespace mrtime::workloads {

inline constexpr const char* kWordCount = "wordcount";
inline constexpr const char* kEximParse = "eximparse";
inline constexpr const char* kSynthetic = "synthetic";

struct JobSpec {
  std::string app;
  std::int64_t mappers = 1;
  std::int64_t reducers = 1;
  std::string_view input;  // must outlive the job call
};

struct KeyValue {
  std::string key;
  std::string value;
};

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// Reducer index for a key: fnv1a64(key) mod reducers.
std::size_t partition_for(std::string_view key, std::int64_t reducers);

/// Splits input into exactly `mappers` line-aligned chunks. Lines are dealt
/// out as evenly as possible with earlier chunks taking the remainder, so
/// only trailing chunks are empty when there are fewer lines than mappers.
/// Concatenating the chunks reproduces the input.
std::vector<std::string> split_input(std::string_view input, std::int64_t mappers);

/// Map/shuffle accounting shared by the jobs.
struct ShuffleStats {
  std::size_t pairs_emitted = 0;   // total key-value pairs out of all mappers
  std::size_t pairs_consumed = 0;  // total pairs read by all reducers
};

struct WordCountResult {
  std::map<std::string, std::uint64_t> counts;
  ShuffleStats shuffle;
  RunSample timing;
};

/// Tokenizes on ASCII whitespace (bytes kept verbatim), emits (word, "1"),
/// partitions by FNV-1a and sums per reducer. Requires spec.app == "wordcount".
WordCountResult run_wordcount(const JobSpec& spec);

struct EximJobResult {
  std::map<std::string, std::vector<std::string>> transactions;  // id -> lines, file order
  std::size_t skipped_lines = 0;                                 // lines without an id
  ShuffleStats shuffle;
  RunSample timing;
};

/// Emits (message id, raw line) for every id-bearing line and groups lines
/// per id. Requires spec.app == "eximparse".
EximJobResult run_exim_job(const JobSpec& spec);

/// Seeded text corpus of roughly `bytes` bytes (whole lines, LF-terminated).
std::string generate_corpus(std::size_t bytes, std::uint64_t seed);

/// Known time polynomial plus Gaussian noise.
class SyntheticTruth {
 public:
  /// Throws InvalidArgument when the model does not take (mappers, reducers),
  /// noise_sigma is negative or non-finite, or the polynomial is not strictly
  /// positive at every lattice point of `ranges`.
  SyntheticTruth(regression::TimeModel model, double noise_sigma, std::uint64_t seed,
                 std::vector<ParamRange> ranges = default_ranges());

  const regression::TimeModel& model() const noexcept { return model_; }
  double noise_sigma() const noexcept { return noise_sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<ParamRange>& ranges() const noexcept { return ranges_; }

  /// Mean of the noise-free polynomial over the declared lattice.
  double lattice_mean() const;

 private:
  regression::TimeModel model_;
  double noise_sigma_;
  std::uint64_t seed_;
  std::vector<ParamRange> ranges_;
};

inline constexpr double kMinSyntheticTime = 1e-9;

/// Polynomial value at config plus noise drawn from a stream keyed by
/// (seed, config values, run_index); clamped to at least kMinSyntheticTime.
double synthetic_time(const SyntheticTruth& truth, const ConfigPoint& config, int run_index);

/// A runnable workload addressed by name. run() performs one execution and
/// returns its total time in seconds.
class Workload {
 public:
  virtual ~Workload() = default;
  virtual std::string name() const = 0;
  virtual double run(const ConfigPoint& config, int run_index) = 0;
};

class SyntheticWorkload final : public Workload {
 public:
  explicit SyntheticWorkload(SyntheticTruth truth) : truth_(std::move(truth)) {}
  std::string name() const override { return kSynthetic; }
  double run(const ConfigPoint& config, int run_index) override;

 private:
  SyntheticTruth truth_;
};

class WordCountWorkload final : public Workload {
 public:
  explicit WordCountWorkload(std::string input) : input_(std::move(input)) {}
  std::string name() const override { return kWordCount; }
  double run(const ConfigPoint& config, int run_index) override;

 private:
  std::string input_;
};

class EximWorkload final : public Workload {
 public:
  explicit EximWorkload(std::string input) : input_(std::move(input)) {}
  std::string name() const override { return kEximParse; }
  double run(const ConfigPoint& config, int run_index) override;

 private:
  std::string input_;
};

class WorkloadRegistry {
 public:
  /// Replaces any workload already registered under the same name.
  void add(std::unique_ptr<Workload> workload);
  bool contains(const std::string& name) const;
  /// Throws UnknownWorkload.
  Workload& get(const std::string& name) const;

 private:
  std::map<std::string, std::unique_ptr<Workload>> workloads_;
};

}  // namespace mrtime::workloads
