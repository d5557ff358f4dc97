#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rvseg {

enum class ErrorCode {
  // geometry
  SingularAffine,
  InvalidAffine,
  InvalidGrid,
  NoOverlap,
  RoiOutOfBounds,
  // data / shape
  ShapeMismatch,
  InvalidLabel,
  InvalidValue,
  // NIfTI
  BadMagic,
  BadHeader,
  UnsupportedDatatype,
  TruncatedData,
  BadEndianness,
  IoFailure,
  DimsOverflow,
  // metrics / statistics
  EmptyMask,
  MissingPhase,
  EmptyInput,
  TooFewPairs,
  // manifests and CLI input
  BadManifest,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the toolkit; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for errors caused by incompatible or degenerate geometry (CLI exit code 3).
bool is_geometry_error(ErrorCode code);

}  // namespace rvseg
