#include "vrecon/core/error.hpp"

namespace vrecon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::Range: return "range";
    case ErrorCode::Decode: return "decode";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DegenerateMesh: return "degenerate_mesh";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::CutFailed: return "cut_failed";
    case ErrorCode::IdentificationFailed: return "identification_failed";
    case ErrorCode::TieUnresolved: return "tie_unresolved";
    case ErrorCode::ManualRequired: return "manual_required";
    case ErrorCode::EmptyHull: return "empty_hull";
    case ErrorCode::ZeroWeights: return "zero_weights";
    case ErrorCode::SizeMismatch: return "size_mismatch";
    case ErrorCode::UnresolvedViews: return "unresolved_views";
    case ErrorCode::ConfigMismatch: return "config_mismatch";
    case ErrorCode::Format: return "format";
    case ErrorCode::Io: return "io";
    case ErrorCode::Invalid: return "invalid";
  }
  return "unknown";
}

}  // namespace vrecon
