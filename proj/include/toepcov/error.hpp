#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toepcov {

enum class ErrorCode {
  BadBandwidth,
  DimensionMismatch,
  NonConverged,
  TooFewSamples,
  NotPsd,
  BadParams,
  Degenerate,
  NotSymmetric,
  DimensionCap,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadBandwidth: return "BAD_BANDWIDTH";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NonConverged: return "NON_CONVERGED";
    case ErrorCode::TooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::NotPsd: return "NOT_PSD";
    case ErrorCode::BadParams: return "BAD_PARAMS";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NotSymmetric: return "NOT_SYMMETRIC";
    case ErrorCode::DimensionCap: return "DIMENSION_CAP";
    case ErrorCode::Parse: return "PARSE_ERROR";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace toepcov
