#include "rvseg/volume.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {
namespace detail {

void validate_voxels(std::span<const Label> values) {
  const auto bad = std::find_if(values.begin(), values.end(), [](Label v) { return v > kMaxLabel; });
  if (bad != values.end()) {
    throw Error(ErrorCode::InvalidLabel,
                fmt::format("label {} at voxel {} is outside {{0,1,2}}", int(*bad), bad - values.begin()));
  }
}

void validate_voxels(std::span<const double> values) {
  const auto bad = std::find_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); });
  if (bad != values.end()) {
    throw Error(ErrorCode::InvalidValue, fmt::format("non-finite intensity at voxel {}", bad - values.begin()));
  }
}

void throw_size_mismatch(std::size_t expected, std::size_t got) {
  throw Error(ErrorCode::ShapeMismatch, fmt::format("expected {} voxels, got {}", expected, got));
}

}  // namespace detail

std::size_t count_label(const LabelVolume& v, Label label) {
  const auto d = v.data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), label));
}

}  // namespace rvseg
