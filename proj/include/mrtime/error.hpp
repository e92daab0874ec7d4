#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrtime {

enum class ErrorKind {
  DimensionMismatch,
  NonFinite,
  RankDeficient,
  InconsistentParameters,
  InsufficientData,
  ParameterMismatch,
  EmptyInput,
  CountExceedsLattice,
  InvalidArgument,
  UnknownWorkload,
  WorkloadFailure,
  ParseError,
  IoError,
};

const char* to_string(ErrorKind kind);

/// All library failures are reported as Error (or a subclass) carrying a kind
/// so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(std::size_t column, const std::string& what)
      : Error(ErrorKind::RankDeficient, what), column_(column) {}

  /// Index of the first column whose R diagonal fell below tolerance.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  /// 1-based line number of the offending input line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mrtime
