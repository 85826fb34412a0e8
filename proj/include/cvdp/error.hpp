#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvdp {

enum class ErrorCode {
  not_in_v,
  dimension_mismatch,
  order_out_of_range,
  rank_out_of_range,
  nonpositive_scale,
  nonpositive_parameter,
  singular_matrix,
  shape_error,
  step_too_large,
  zero_initial_condition,
  not_metzler,
  out_of_unit_cube,
  inadmissible_state,
  numerical_abort,
  parse_error,
  invalid_argument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_in_v: return "NotInV";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::order_out_of_range: return "OrderOutOfRange";
    case ErrorCode::rank_out_of_range: return "RankOutOfRange";
    case ErrorCode::nonpositive_scale: return "NonpositiveScale";
    case ErrorCode::nonpositive_parameter: return "NonpositiveParameter";
    case ErrorCode::singular_matrix: return "SingularMatrix";
    case ErrorCode::shape_error: return "ShapeError";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::zero_initial_condition: return "ZeroInitialCondition";
    case ErrorCode::not_metzler: return "NotMetzler";
    case ErrorCode::out_of_unit_cube: return "OutOfUnitCube";
    case ErrorCode::inadmissible_state: return "InadmissibleState";
    case ErrorCode::numerical_abort: return "NumericalAbort";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cvdp
