#include "rvseg/error.hpp"

namespace rvseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularAffine: return "SingularAffine";
    case ErrorCode::InvalidAffine: return "InvalidAffine";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::BadEndianness: return "BadEndianness";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DimsOverflow: return "DimsOverflow";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MissingPhase: return "MissingPhase";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::BadManifest: return "BadManifest";
  }
  return "Unknown";
}

bool is_geometry_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularAffine:
    case ErrorCode::InvalidAffine:
    case ErrorCode::InvalidGrid:
    case ErrorCode::NoOverlap:
    case ErrorCode::RoiOutOfBounds:
      return true;
    default:
      return false;
  }
}

}  // namespace rvseg
