#pragma once

#include <stdexcept>
#include <string>

namespace yawdeblur {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kTruncated,
  kUnsupportedFormat,
  kIo,
  kIllPosed,
  kNotFound,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace yawdeblur
