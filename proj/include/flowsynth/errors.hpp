#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flowsynth {

enum class ErrorCode {
  kParse,
  kDanglingReference,
  kDuplicateId,
  kInvariant,
  kInvalidGraph,
  kUnknownUnit,
  kUnknownNode,
  kUnresolvedName,
  kUnresolvedRule,
  kSizeLimit,
  kMissingJudgment,
  kTransport,
  kTimeout,
  kProtocol,
  kMalformedResponse,
  kEmptyResponse,
  kNoEntry,
  kNoPerturbableUnit,
  kInvalidArgument,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library. `subject` carries the offending id,
// token or location so callers can report it without parsing `what()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace flowsynth
