#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nehari {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  ConfigInvalid,
  InvalidSampling,
  WInXMinus,
  ZInXMinus,
  NoConvergence,
  DegenerateS,
  InnerFailure,
  NoSolutions,
  Io,
};

/// Machine-readable tag, e.g. "CONFIG_INVALID".
constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::InvalidSampling: return "INVALID_SAMPLING";
    case ErrorCode::WInXMinus: return "W_IN_XMINUS";
    case ErrorCode::ZInXMinus: return "Z_IN_XMINUS";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::DegenerateS: return "DEGENERATE_S";
    case ErrorCode::InnerFailure: return "INNER_FAILURE";
    case ErrorCode::NoSolutions: return "NO_SOLUTIONS";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nehari
