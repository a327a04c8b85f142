#include "obgraph/error.hpp"

namespace obg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kOMUnavailable: return "OMUnavailable";
    case ErrorCode::kOMTooSmall: return "OMTooSmall";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kBlockOverflow: return "BlockOverflow";
    case ErrorCode::kMalformedBlock: return "MalformedBlock";
    case ErrorCode::kParamMismatch: return "ParamMismatch";
    case ErrorCode::kUnknownSource: return "UnknownSource";
    case ErrorCode::kSymmetryRequired: return "SymmetryRequired";
    case ErrorCode::kObliviousnessViolation: return "ObliviousnessViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace obg
