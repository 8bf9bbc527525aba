#include "focal/error.h"

namespace focal {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::kInvalidPair:
      return "invalid_pair";
    case ErrorCode::kInsufficientGroup:
      return "insufficient_group";
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kOutOfRange:
      return "out_of_range";
    case ErrorCode::kIncomplete:
      return "incomplete";
    case ErrorCode::kDegenerateDirection:
      return "degenerate_direction";
    case ErrorCode::kFrontierGap:
      return "frontier_gap";
    case ErrorCode::kNotPositiveDefinite:
      return "not_positive_definite";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace focal
