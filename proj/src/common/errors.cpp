#include "flowsynth/errors.hpp"

namespace flowsynth {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kInvariant: return "invariant";
    case ErrorCode::kInvalidGraph: return "invalid_graph";
    case ErrorCode::kUnknownUnit: return "unknown_unit";
    case ErrorCode::kUnknownNode: return "unknown_node";
    case ErrorCode::kUnresolvedName: return "unresolved_name";
    case ErrorCode::kUnresolvedRule: return "unresolved_rule";
    case ErrorCode::kSizeLimit: return "size_limit";
    case ErrorCode::kMissingJudgment: return "missing_judgment";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kEmptyResponse: return "empty_response";
    case ErrorCode::kNoEntry: return "no_entry";
    case ErrorCode::kNoPerturbableUnit: return "no_perturbable_unit";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace flowsynth
