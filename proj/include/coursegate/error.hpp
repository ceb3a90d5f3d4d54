#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace coursegate {

// Machine-readable error codes. The string form (see to_string) is the wire
// token used by the CLI and the HTTP API.
enum class ErrorCode {
  kDuplicateId,
  kValidationFailed,
  kUnknownModule,
  kStarsOutOfRange,
  kMalformedArchive,
  kUnsupportedVersion,
  kCycleDetected,
  kUnsatisfiable,
  kUnresolvedPrereq,
  kInvalidWorkflow,
  kBrokenDependency,
  kUnknownNode,
  kMalformedWorkflow,
  kEmptyPool,
  kAdapterMissing,
  kAdapterFailure,
  kBadParameter,
  kUnknownRun,
  kPortInUse,
  kDataDirUnwritable,
  kNotFound,
  kBadRequest,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }
  const nlohmann::json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace coursegate
