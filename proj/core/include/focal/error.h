#ifndef FOCAL_ERROR_H_
#define FOCAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace focal {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidPair,
  kInsufficientGroup,
  kInvalidArgument,
  kOutOfRange,
  kIncomplete,
  kDegenerateDirection,
  kFrontierGap,
  kNotPositiveDefinite,
  kParse,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as focal::Error; the code lets callers branch
// without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace focal

#endif  // FOCAL_ERROR_H_
