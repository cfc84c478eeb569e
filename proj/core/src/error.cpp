#include "oscar/error.hpp"

namespace oscar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kProviderUnavailable: return "provider_unavailable";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kUnsupportedOperation: return "unsupported_operation";
    case ErrorCode::kDegenerateVector: return "degenerate_vector";
    case ErrorCode::kIncompleteObject: return "incomplete_object";
    case ErrorCode::kEmptyIndex: return "empty_index";
  }
  return "unknown";
}

}  // namespace oscar
