#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conformlets {

enum class ErrorCode {
  domain,
  dimension_mismatch,
  division_by_zero,
  non_unit_rotor,
  invalid_argument,
  grid_mismatch,
  singular_multiplier,
  invalid_matrix,
  format,
  io,
  config,
  validation,
  verification_failed,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "E_DOMAIN";
    case ErrorCode::dimension_mismatch: return "E_DIMENSION";
    case ErrorCode::division_by_zero: return "E_DIVISION_BY_ZERO";
    case ErrorCode::non_unit_rotor: return "E_NON_UNIT_ROTOR";
    case ErrorCode::invalid_argument: return "E_INVALID_ARGUMENT";
    case ErrorCode::grid_mismatch: return "E_GRID_MISMATCH";
    case ErrorCode::singular_multiplier: return "E_SINGULAR_MULTIPLIER";
    case ErrorCode::invalid_matrix: return "E_INVALID_MATRIX";
    case ErrorCode::format: return "E_FORMAT";
    case ErrorCode::io: return "E_IO";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::validation: return "E_VALIDATION";
    case ErrorCode::verification_failed: return "E_VERIFY";
  }
  return "E_UNKNOWN";
}

// Process exit status used by the command-line tool for each error class.
constexpr int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return 3;
    case ErrorCode::format: return 4;
    case ErrorCode::config: return 5;
    case ErrorCode::validation: return 6;
    case ErrorCode::singular_multiplier: return 7;
    case ErrorCode::verification_failed: return 8;
    default: return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace conformlets
