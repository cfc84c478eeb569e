#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oscar {

enum class ErrorCode {
  kInvalidArgument,
  kConflict,
  kNotFound,
  kIntegrity,
  kUnsupportedVersion,
  kProviderUnavailable,
  kProtocol,
  kInvalidInput,
  kUnsupportedOperation,
  kDegenerateVector,
  kIncompleteObject,
  kEmptyIndex,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the engine carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can dispatch on category.
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

}  // namespace oscar
