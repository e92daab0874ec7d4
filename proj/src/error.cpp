#include "mrtime/error.hpp"

namespace mrtime {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InconsistentParameters: return "InconsistentParameters";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ParameterMismatch: return "ParameterMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::CountExceedsLattice: return "CountExceedsLattice";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnknownWorkload: return "UnknownWorkload";
    case ErrorKind::WorkloadFailure: return "WorkloadFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mrtime
