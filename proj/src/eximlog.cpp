#include "mrtime/eximlog.hpp"

#include <array>
#include <cctype>
#include <ctime>

#include "mrtime/rng.hpp"

namespace mrtime::eximlog {

const char* to_string(Flag flag) {
  switch (flag) {
    case Flag::Arrival: return "arrival";
    case Flag::Delivery: return "delivery";
    case Flag::AdditionalDelivery: return "additional-delivery";
    case Flag::Deferral: return "deferral";
    case Flag::Failure: return "failure";
    case Flag::Completed: return "completed";
    case Flag::Other: return "other";
  }
  return "other";
}

namespace {

constexpr std::string_view kBase62 =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

bool is_base62(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f' || c == '\n';
}

bool is_timestamp(std::string_view s) {
  static constexpr std::string_view shape = "dddd-dd-dd dd:dd:dd";
  if (s.size() < shape.size()) return false;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == 'd' ? !is_digit(s[i]) : s[i] != shape[i]) return false;
  }
  return true;
}

// Next whitespace-delimited token starting at or after pos; empty at end.
std::string_view next_token(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && is_space(s[pos])) ++pos;
  const std::size_t start = pos;
  while (pos < s.size() && !is_space(s[pos])) ++pos;
  return s.substr(start, pos - start);
}

Flag flag_for(std::string_view token) {
  if (token == "<=") return Flag::Arrival;
  if (token == "=>") return Flag::Delivery;
  if (token == "->") return Flag::AdditionalDelivery;
  if (token == "==") return Flag::Deferral;
  if (token == "**") return Flag::Failure;
  if (token == "Completed") return Flag::Completed;
  return Flag::Other;
}

}  // namespace

bool is_message_id(std::string_view token) {
  if (token.size() != 16 || token[6] != '-' || token[13] != '-') return false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (i == 6 || i == 13) continue;
    if (!is_base62(token[i])) return false;
  }
  return true;
}

LogLine parse_line(std::string_view line) {
  LogLine out;
  out.raw = std::string(line);
  std::size_t pos = 0;
  if (is_timestamp(line)) {
    out.timestamp = std::string(line.substr(0, 19));
    pos = 19;
  }
  for (auto tok = next_token(line, pos); !tok.empty(); tok = next_token(line, pos)) {
    if (is_message_id(tok)) {
      out.message_id = std::string(tok);
      out.flag = flag_for(next_token(line, pos));
      break;
    }
  }
  return out;
}

std::vector<LogLine> parse_log(std::string_view text) {
  std::vector<LogLine> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_line(text.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

const Transaction* TransactionMap::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &transactions_[it->second];
}

void TransactionMap::add(LogLine line) {
  if (!line.message_id) {
    ++skipped_;
    return;
  }
  auto [it, inserted] = index_.try_emplace(*line.message_id, transactions_.size());
  if (inserted) transactions_.push_back(Transaction{*line.message_id, {}});
  transactions_[it->second].lines.push_back(std::move(line));
}

TransactionMap group_transactions(std::vector<LogLine> lines) {
  TransactionMap map;
  for (auto& line : lines) map.add(std::move(line));
  return map;
}

namespace {

constexpr std::time_t kLogEpoch = 1262304000;  // 2010-01-01 00:00:00 UTC

std::string format_timestamp(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
  return buf;
}

struct Pending {
  std::string id;
  std::vector<Flag> events;
  std::size_t next = 0;
};

class LogWriter {
 public:
  explicit LogWriter(std::uint64_t seed) : rng_(seed) {}

  Xoshiro256ss& rng() { return rng_; }

  void tick() { now_ += static_cast<std::time_t>(rng_.uniform_below(4)); }

  void noise(GeneratedLog& log) {
    static constexpr std::array<std::string_view, 5> kinds = {
        "Start queue run: pid=", "End queue run: pid=", "exim 4.69 daemon started: pid=",
        "SMTP connection from [192.0.2.", "no host name found for IP address 198.51.100."};
    const auto k = rng_.uniform_below(kinds.size());
    std::string line = format_timestamp(now_) + " " + std::string(kinds[k]);
    line += std::to_string(k < 3 ? 1000 + rng_.uniform_below(30000) : 1 + rng_.uniform_below(254));
    if (k == 2) line += ", -q30m, listening for SMTP on port 25";
    if (k == 3) line += "] lost";
    emit(log, line);
    ++log.noise_lines;
  }

  void event(GeneratedLog& log, const std::string& id, Flag flag) {
    std::string line = format_timestamp(now_) + " " + id + " ";
    const auto user = std::to_string(rng_.uniform_below(500));
    const auto host = std::to_string(1 + rng_.uniform_below(254));
    switch (flag) {
      case Flag::Arrival:
        line += "<= sender" + user + "@example.com H=mail.example.com [192.0.2." + host +
                "] P=esmtp S=" + std::to_string(500 + rng_.uniform_below(50000));
        break;
      case Flag::Delivery:
        line += "=> rcpt" + user + "@example.org R=dnslookup T=remote_smtp H=mx.example.org [203.0.113." +
                host + "]";
        break;
      case Flag::AdditionalDelivery:
        line += "-> copy" + user + "@example.org R=dnslookup T=remote_smtp H=mx.example.org [203.0.113." +
                host + "]";
        break;
      case Flag::Deferral:
        line += "== rcpt" + user + "@example.net R=dnslookup T=remote_smtp defer (-53): retry time not reached";
        break;
      case Flag::Failure:
        line += "** rcpt" + user + "@invalid.example R=dnslookup: Unrouteable address";
        break;
      case Flag::Completed:
        line += "Completed";
        break;
      case Flag::Other:
        line += "SMTP data timeout";
        break;
    }
    emit(log, line);
    auto& entry = log.manifest[id];
    ++entry.line_count;
    entry.flags.push_back(flag);
  }

  std::string fresh_id(const GeneratedLog& log) {
    for (;;) {
      std::string id(16, '-');
      for (std::size_t i = 0; i < id.size(); ++i) {
        if (i == 6 || i == 13) continue;
        id[i] = kBase62[rng_.uniform_below(kBase62.size())];
      }
      if (!log.manifest.contains(id)) return id;
    }
  }

 private:
  void emit(GeneratedLog& log, const std::string& line) {
    log.text += line;
    log.text += '\n';
  }

  Xoshiro256ss rng_;
  std::time_t now_ = kLogEpoch;
};

std::vector<Flag> plan_events(Xoshiro256ss& rng) {
  std::vector<Flag> events{Flag::Arrival};
  const auto extra = rng.uniform_below(4);
  for (std::uint64_t i = 0; i < extra; ++i) {
    const auto r = rng.uniform_below(10);
    events.push_back(r < 6   ? Flag::Delivery
                     : r < 8 ? Flag::AdditionalDelivery
                     : r < 9 ? Flag::Deferral
                             : Flag::Failure);
  }
  events.push_back(Flag::Completed);
  return events;
}

}  // namespace

GeneratedLog generate_log(std::size_t transactions, std::uint64_t seed) {
  constexpr std::size_t kMaxActive = 8;
  GeneratedLog log;
  LogWriter w(seed);
  auto& rng = w.rng();

  w.noise(log);
  std::vector<Pending> active;
  std::size_t to_start = transactions;
  while (to_start > 0 || !active.empty()) {
    w.tick();
    if (rng.uniform_below(10) == 0) {
      w.noise(log);
      continue;
    }
    const bool start = to_start > 0 &&
                       (active.empty() || (active.size() < kMaxActive && rng.uniform_below(2) == 0));
    if (start) {
      Pending p{w.fresh_id(log), plan_events(rng), 0};
      log.ids.push_back(p.id);
      w.event(log, p.id, p.events[p.next++]);
      active.push_back(std::move(p));
      --to_start;
      continue;
    }
    const auto pick = rng.uniform_below(active.size());
    auto& p = active[pick];
    w.event(log, p.id, p.events[p.next++]);
    if (p.next == p.events.size()) {
      active[pick] = std::move(active.back());
      active.pop_back();
    }
  }
  w.noise(log);
  w.noise(log);
  return log;
}

}  // namespace mrtime::eximlog
