#include "pdc/error.hpp"

namespace pdc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Range: return "range";
    case ErrorCode::Config: return "config";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Coding: return "coding";
    case ErrorCode::Truncation: return "truncation";
    case ErrorCode::Corruption: return "corruption";
    case ErrorCode::Format: return "format";
    case ErrorCode::Consistency: return "consistency";
    case ErrorCode::Degenerate: return "degenerate-input";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::InsufficientSize: return "insufficient-size";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::uint64_t offset)
    : std::runtime_error(std::string(to_string(code)) + ": " + message + " (at byte " +
                         std::to_string(offset) + ")"),
      code_(code),
      offset_(offset) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace pdc
