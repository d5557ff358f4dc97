#pragma once

#include <vector>

#include "rvseg/geom.hpp"
#include "rvseg/volume.hpp"

namespace rvseg {

inline constexpr double kFallbackSlabHalfwidthMm = 5.0;

/// Tunables of the LA -> SA transition.
struct TransitionParams {
  /// Half thickness of the slab a single-slice image occupies in 3D.
  double slab_halfwidth_mm = kFallbackSlabHalfwidthMm;
  /// RV voxels a transformed slice needs before it counts as RV-containing.
  int slice_rv_threshold_vox = 1;
  /// Isotropic ROI dilation in millimetres.
  double margin_mm = 10.0;

  /// Throws Error(InvalidValue) if any field is out of range.
  void validate() const;
};

/// Half of the LA slice thickness, or 5 mm when the header reports none.
double default_slab_halfwidth(double la_slice_thickness_mm);

struct IndexRange {
  int lo = 0;
  int hi = 0;
  int extent() const { return hi - lo + 1; }
  bool contains(int v) const { return v >= lo && v <= hi; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Inclusive index box.
struct BoundingBox {
  IndexRange i;
  IndexRange j;
  IndexRange k;

  Dims extents() const { return {i.extent(), j.extent(), k.extent()}; }
  bool within(const Dims& d) const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct RoiSpec {
  BoundingBox bbox;
  /// SA slices whose transformed LA labels contain RV.
  IndexRange rv_slices;
  double margin_mm = 0.0;

  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

/// Resamples `src` labels onto `dst` by nearest neighbour through the shared
/// physical frame: dst index -> world -> src index (round half up). Voxels
/// that fall outside the source extent stay background. A single-slice
/// source is treated as a slab of +/- slab_halfwidth_mm about its plane, in
/// place of the +/- half voxel extent along its slice axis.
LabelVolume transform_label(const LabelVolume& src, const VoxelGrid& dst, const TransitionParams& params);

/// ROI from LA labels already transformed onto the SA grid. The in-plane box
/// covers LV and RV; the slice range is limited to RV-containing slices. Both
/// are dilated by ceil(margin_mm / spacing) voxels and clipped to the grid.
/// Throws Error(NoOverlap) when no label (or no RV slice) is present.
RoiSpec derive_roi(const LabelVolume& transformed_la, const TransitionParams& params);

/// Grid of the sub-volume covered by `box`; world coordinates of shared
/// voxels are unchanged.
VoxelGrid crop_grid(const VoxelGrid& grid, const BoundingBox& box);

template <class T>
Volume<T> crop_to_roi(const Volume<T>& v, const RoiSpec& roi) {
  VoxelGrid out_grid = crop_grid(v.grid(), roi.bbox);
  const Dims& od = out_grid.dims();
  std::vector<T> data;
  data.reserve(od.count());
  for (int k = roi.bbox.k.lo; k <= roi.bbox.k.hi; ++k) {
    for (int j = roi.bbox.j.lo; j <= roi.bbox.j.hi; ++j) {
      for (int i = roi.bbox.i.lo; i <= roi.bbox.i.hi; ++i) data.push_back(v.at(i, j, k));
    }
  }
  return Volume<T>(std::move(out_grid), std::move(data));
}

/// Places `cropped` back into `full_grid` at the ROI box, zero elsewhere.
LabelVolume embed_from_roi(const LabelVolume& cropped, const RoiSpec& roi, const VoxelGrid& full_grid);

/// Removes RV labels on slices outside roi.rv_slices.
LabelVolume mask_non_rv(const LabelVolume& sa_prediction, const RoiSpec& roi);

}  // namespace rvseg
