#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rvseg/geom.hpp"

namespace rvseg {

using Label = std::uint8_t;

/// Internal label set: LV cavity and myocardium share one label.
inline constexpr Label kBackground = 0;
inline constexpr Label kLv = 1;
inline constexpr Label kRv = 2;
inline constexpr Label kMaxLabel = kRv;

namespace detail {
void validate_voxels(std::span<const Label> values);
void validate_voxels(std::span<const double> values);
void throw_size_mismatch(std::size_t expected, std::size_t got);
}  // namespace detail

/// Immutable grid-attached voxel array. Label volumes hold only {0,1,2};
/// intensity volumes hold only finite values.
template <class T>
class Volume {
 public:
  using value_type = T;

  explicit Volume(VoxelGrid grid) : grid_(std::move(grid)), data_(grid_.dims().count(), T{}) {}

  Volume(VoxelGrid grid, std::vector<T> data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_.dims().count()) {
      detail::throw_size_mismatch(grid_.dims().count(), data_.size());
    }
    detail::validate_voxels(std::span<const T>(data_));
  }

  const VoxelGrid& grid() const { return grid_; }
  const Dims& dims() const { return grid_.dims(); }
  std::span<const T> data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  T at(int i, int j, int k) const { return data_[grid_.dims().index(i, j, k)]; }
  T operator[](std::size_t idx) const { return data_[idx]; }

  /// Same array on a different grid of identical dims (used when a header is rewritten).
  Volume with_grid(VoxelGrid grid) const {
    if (!(grid.dims() == grid_.dims())) {
      detail::throw_size_mismatch(grid_.dims().count(), grid.dims().count());
    }
    return Volume(std::move(grid), data_);
  }

 private:
  VoxelGrid grid_;
  std::vector<T> data_;
};

using LabelVolume = Volume<Label>;
using IntensityVolume = Volume<double>;

std::size_t count_label(const LabelVolume& v, Label label);

}  // namespace rvseg
