#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdc {

/// Error categories. The numeric value doubles as the CLI exit code.
enum class ErrorCode : int {
  InvalidInput = 2,
  Range = 3,
  Config = 4,
  Infeasible = 5,
  InsufficientData = 6,
  Coding = 7,
  Truncation = 8,
  Corruption = 9,
  Format = 10,
  Consistency = 11,
  Degenerate = 12,
  DimensionMismatch = 13,
  InsufficientSize = 14,
  Io = 15,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  /// Format errors carry the byte offset at which parsing failed.
  Error(ErrorCode code, const std::string& message, std::uint64_t offset);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> offset_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace pdc
