#pragma once

// Exim mainlog lines:
//
//   2010-01-01 09:00:00 1Abcde-0123Fg-Hz <= alice@example.com H=... S=1234
//   2010-01-01 09:00:01 1Abcde-0123Fg-Hz => bob@example.org R=dnslookup ...
//   2010-01-01 09:00:02 1Abcde-0123Fg-Hz Completed
//
// Message ids are 6-6-2 base-62 characters separated by '-'. Lines without
// an id (queue runs, daemon messages) are kept but carry no transaction.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mrtime::eximlog {

enum class Flag {
  Arrival,             // <=
  Delivery,            // =>
  AdditionalDelivery,  // ->
  Deferral,            // ==
  Failure,             // **
  Completed,           // "Completed"
  Other,
};

const char* to_string(Flag flag);

struct LogLine {
  std::optional<std::string> timestamp;   // "YYYY-MM-DD HH:MM:SS"
  std::optional<std::string> message_id;
  std::optional<Flag> flag;               // set iff message_id is set
  std::string raw;

  friend bool operator==(const LogLine&, const LogLine&) = default;
};

bool is_message_id(std::string_view token);

/// Total: never throws, always preserves raw.
LogLine parse_line(std::string_view line);

/// Splits on LF (a trailing LF does not produce an empty final line) and
/// parses every line.
std::vector<LogLine> parse_log(std::string_view text);

struct Transaction {
  std::string id;
  std::vector<LogLine> lines;
};

/// Transactions in order of first appearance, with lookup by id.
class TransactionMap {
 public:
  const std::vector<Transaction>& transactions() const noexcept { return transactions_; }
  std::size_t size() const noexcept { return transactions_.size(); }
  bool empty() const noexcept { return transactions_.empty(); }
  const Transaction* find(const std::string& id) const;

  /// Number of input lines that carried no message id.
  std::size_t skipped_lines() const noexcept { return skipped_; }

  void add(LogLine line);

 private:
  std::vector<Transaction> transactions_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t skipped_ = 0;
};

TransactionMap group_transactions(std::vector<LogLine> lines);

struct ManifestEntry {
  std::size_t line_count = 0;
  std::vector<Flag> flags;  // in emission order

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct GeneratedLog {
  std::string text;
  std::vector<std::string> ids;  // manifest ids in order of arrival
  std::unordered_map<std::string, ManifestEntry> manifest;
  std::size_t noise_lines = 0;
};

/// Deterministic synthetic mainlog: `transactions` distinct ids, each with an
/// arrival, zero or more deliveries/deferrals/failures, and a Completed line,
/// interleaved, plus roughly one noise line per ten lines.
GeneratedLog generate_log(std::size_t transactions, std::uint64_t seed);

}  // namespace mrtime::eximlog
