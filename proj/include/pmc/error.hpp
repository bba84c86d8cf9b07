#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

enum class ErrorCode {
  InvalidInput,
  DivisionByAxis,
  StepSizeUnderflow,
  LimitMismatch,
  ChartWidthUnderflow,
  NormBoundExceeded,
  DenominatorVanished,
  UnsupportedOrder,
  EventAccumulation,
};

[[nodiscard]] inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::DivisionByAxis: return "division_by_axis";
    case ErrorCode::StepSizeUnderflow: return "step_size_underflow";
    case ErrorCode::LimitMismatch: return "limit_mismatch";
    case ErrorCode::ChartWidthUnderflow: return "chart_width_underflow";
    case ErrorCode::NormBoundExceeded: return "norm_bound_exceeded";
    case ErrorCode::DenominatorVanished: return "denominator_vanished";
    case ErrorCode::UnsupportedOrder: return "unsupported_order";
    case ErrorCode::EventAccumulation: return "event_accumulation";
  }
  return "unknown";
}

/// Single exception type for the library; the code tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define PMC_REQUIRE(cond, code, msg)        \
  do {                                      \
    if (!(cond)) throw ::pmc::Error((code), (msg)); \
  } while (0)

}  // namespace pmc
