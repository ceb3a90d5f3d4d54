#include "coursegate/error.hpp"

namespace coursegate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kValidationFailed: return "VALIDATION_FAILED";
    case ErrorCode::kUnknownModule: return "UNKNOWN_MODULE";
    case ErrorCode::kStarsOutOfRange: return "STARS_OUT_OF_RANGE";
    case ErrorCode::kMalformedArchive: return "MALFORMED_ARCHIVE";
    case ErrorCode::kUnsupportedVersion: return "UNSUPPORTED_VERSION";
    case ErrorCode::kCycleDetected: return "CYCLE_DETECTED";
    case ErrorCode::kUnsatisfiable: return "UNSATISFIABLE";
    case ErrorCode::kUnresolvedPrereq: return "UNRESOLVED_PREREQ";
    case ErrorCode::kInvalidWorkflow: return "INVALID_WORKFLOW";
    case ErrorCode::kBrokenDependency: return "BROKEN_DEPENDENCY";
    case ErrorCode::kUnknownNode: return "UNKNOWN_NODE";
    case ErrorCode::kMalformedWorkflow: return "MALFORMED_WORKFLOW";
    case ErrorCode::kEmptyPool: return "EMPTY_POOL";
    case ErrorCode::kAdapterMissing: return "ADAPTER_MISSING";
    case ErrorCode::kAdapterFailure: return "ADAPTER_FAILURE";
    case ErrorCode::kBadParameter: return "BAD_PARAMETER";
    case ErrorCode::kUnknownRun: return "UNKNOWN_RUN";
    case ErrorCode::kPortInUse: return "PORT_IN_USE";
    case ErrorCode::kDataDirUnwritable: return "DATA_DIR_UNWRITABLE";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kBadRequest: return "BAD_REQUEST";
  }
  return "UNKNOWN";
}

}  // namespace coursegate
