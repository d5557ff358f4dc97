#include "rvseg/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {
namespace {

int nearest_index(double s) { return static_cast<int>(std::floor(s + 0.5)); }

// Voxel margin for a millimetre margin; the epsilon keeps exact multiples
// (10 mm on 1.25 mm) from rounding up an extra voxel.
int margin_voxels(double margin_mm, double spacing) {
  if (margin_mm <= 0.0) return 0;
  return static_cast<int>(std::ceil(margin_mm / spacing - 1e-9));
}

IndexRange dilate_clip(IndexRange r, int by, int n) { return {std::max(0, r.lo - by), std::min(n - 1, r.hi + by)}; }

}  // namespace

void TransitionParams::validate() const {
  if (!(slab_halfwidth_mm > 0.0) || !std::isfinite(slab_halfwidth_mm)) {
    throw Error(ErrorCode::InvalidValue, fmt::format("slab_halfwidth_mm must be > 0, got {}", slab_halfwidth_mm));
  }
  if (slice_rv_threshold_vox < 1) {
    throw Error(ErrorCode::InvalidValue,
                fmt::format("slice_rv_threshold_vox must be >= 1, got {}", slice_rv_threshold_vox));
  }
  if (!(margin_mm >= 0.0) || !std::isfinite(margin_mm)) {
    throw Error(ErrorCode::InvalidValue, fmt::format("margin_mm must be >= 0, got {}", margin_mm));
  }
}

double default_slab_halfwidth(double la_slice_thickness_mm) {
  if (!(la_slice_thickness_mm > 0.0) || !std::isfinite(la_slice_thickness_mm)) return kFallbackSlabHalfwidthMm;
  return 0.5 * la_slice_thickness_mm;
}

bool BoundingBox::within(const Dims& d) const {
  const IndexRange r[3] = {i, j, k};
  for (int a = 0; a < 3; ++a) {
    if (r[a].lo < 0 || r[a].lo > r[a].hi || r[a].hi >= d[a]) return false;
  }
  return true;
}

LabelVolume transform_label(const LabelVolume& src, const VoxelGrid& dst, const TransitionParams& params) {
  params.validate();
  const Dims& sd = src.dims();
  const Dims& dd = dst.dims();

  // x_src = T_src^-1 (T_dst (x_dst))
  const Affine4 dst_to_src = compose(src.grid().inverse_affine(), dst.affine());
  const Mat3 lin = dst_to_src.linear();
  const Vec3 off = dst_to_src.offset();

  const bool slab = src.grid().is_single_slice();
  // Physical distance from the source plane per unit of continuous k.
  const double mm_per_k = slab ? std::abs(src.grid().affine().linear().col(2).dot(src.grid().slice_normal())) : 0.0;

  std::vector<Label> out(dd.count(), kBackground);
  for (int k = 0; k < dd.nz; ++k) {
    for (int j = 0; j < dd.ny; ++j) {
      for (int i = 0; i < dd.nx; ++i) {
        const Vec3 s = lin * Vec3(i, j, k) + off;
        const int si = nearest_index(s.x());
        const int sj = nearest_index(s.y());
        if (si < 0 || si >= sd.nx || sj < 0 || sj >= sd.ny) continue;

        int sk = 0;
        if (slab) {
          if (std::abs(s.z()) * mm_per_k > params.slab_halfwidth_mm) continue;
        } else {
          sk = nearest_index(s.z());
          if (sk < 0 || sk >= sd.nz) continue;
        }
        out[dd.index(i, j, k)] = src.at(si, sj, sk);
      }
    }
  }
  return LabelVolume(dst, std::move(out));
}

RoiSpec derive_roi(const LabelVolume& transformed_la, const TransitionParams& params) {
  params.validate();
  const Dims& d = transformed_la.dims();

  constexpr int kNone = std::numeric_limits<int>::max();
  IndexRange ri{kNone, -1}, rj{kNone, -1}, rk{kNone, -1};
  std::vector<int> rv_per_slice(static_cast<std::size_t>(d.nz), 0);

  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        const Label l = transformed_la.at(i, j, k);
        if (l == kBackground) continue;
        ri = {std::min(ri.lo, i), std::max(ri.hi, i)};
        rj = {std::min(rj.lo, j), std::max(rj.hi, j)};
        rk = {std::min(rk.lo, k), std::max(rk.hi, k)};
        if (l == kRv) ++rv_per_slice[static_cast<std::size_t>(k)];
      }
    }
  }
  if (ri.hi < 0) {
    throw Error(ErrorCode::NoOverlap, "transformed LA labels are empty; the LA plane misses the SA stack");
  }

  IndexRange rv{kNone, -1};
  for (int k = 0; k < d.nz; ++k) {
    if (rv_per_slice[static_cast<std::size_t>(k)] >= params.slice_rv_threshold_vox) {
      rv = {std::min(rv.lo, k), std::max(rv.hi, k)};
    }
  }
  if (rv.hi < 0) {
    throw Error(ErrorCode::NoOverlap,
                fmt::format("no SA slice reaches {} transformed RV voxels", params.slice_rv_threshold_vox));
  }

  const Vec3& sp = transformed_la.grid().spacing();
  const int mi = margin_voxels(params.margin_mm, sp.x());
  const int mj = margin_voxels(params.margin_mm, sp.y());
  const int mk = margin_voxels(params.margin_mm, sp.z());

  RoiSpec roi;
  roi.margin_mm = params.margin_mm;
  roi.rv_slices = rv;
  roi.bbox.i = dilate_clip(ri, mi, d.nx);
  roi.bbox.j = dilate_clip(rj, mj, d.ny);
  const IndexRange k_all = dilate_clip(rk, mk, d.nz);
  const IndexRange k_rv = dilate_clip(rv, mk, d.nz);
  roi.bbox.k = {std::max(k_all.lo, k_rv.lo), std::min(k_all.hi, k_rv.hi)};
  return roi;
}

VoxelGrid crop_grid(const VoxelGrid& grid, const BoundingBox& box) {
  if (!box.within(grid.dims())) {
    throw Error(ErrorCode::RoiOutOfBounds,
                fmt::format("box ({}..{}, {}..{}, {}..{}) outside grid {}x{}x{}", box.i.lo, box.i.hi, box.j.lo,
                            box.j.hi, box.k.lo, box.k.hi, grid.dims().nx, grid.dims().ny, grid.dims().nz));
  }
  const Affine4 shift = Affine4::translation(box.i.lo, box.j.lo, box.k.lo);
  return VoxelGrid(box.extents(), compose(grid.affine(), shift));
}

LabelVolume embed_from_roi(const LabelVolume& cropped, const RoiSpec& roi, const VoxelGrid& full_grid) {
  if (!roi.bbox.within(full_grid.dims())) {
    throw Error(ErrorCode::RoiOutOfBounds, "ROI box lies outside the full grid");
  }
  const Dims want = roi.bbox.extents();
  if (!(cropped.dims() == want)) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("cropped dims {}x{}x{} do not match ROI extents {}x{}x{}", cropped.dims().nx,
                            cropped.dims().ny, cropped.dims().nz, want.nx, want.ny, want.nz));
  }
  const Dims& fd = full_grid.dims();
  std::vector<Label> out(fd.count(), kBackground);
  for (int k = 0; k < want.nz; ++k) {
    for (int j = 0; j < want.ny; ++j) {
      for (int i = 0; i < want.nx; ++i) {
        out[fd.index(i + roi.bbox.i.lo, j + roi.bbox.j.lo, k + roi.bbox.k.lo)] = cropped.at(i, j, k);
      }
    }
  }
  return LabelVolume(full_grid, std::move(out));
}

LabelVolume mask_non_rv(const LabelVolume& sa_prediction, const RoiSpec& roi) {
  const Dims& d = sa_prediction.dims();
  std::vector<Label> out(sa_prediction.data().begin(), sa_prediction.data().end());
  for (int k = 0; k < d.nz; ++k) {
    if (roi.rv_slices.contains(k)) continue;
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        Label& l = out[d.index(i, j, k)];
        if (l == kRv) l = kBackground;
      }
    }
  }
  return LabelVolume(sa_prediction.grid(), std::move(out));
}

}  // namespace rvseg
