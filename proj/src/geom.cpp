#include "rvseg/geom.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {

Affine4::Affine4(const Mat4& m) : m_(m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidAffine, "affine has non-finite entries");
  }
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw Error(ErrorCode::InvalidAffine, "bottom row must be exactly (0,0,0,1)");
  }
}

Affine4 Affine4::translation(double tx, double ty, double tz) {
  Mat4 m = Mat4::Identity();
  m(0, 3) = tx;
  m(1, 3) = ty;
  m(2, 3) = tz;
  return Affine4(m);
}

Affine4 Affine4::from_linear(const Mat3& linear, const Vec3& offset) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = linear;
  m.topRightCorner<3, 1>() = offset;
  return Affine4(m);
}

bool Affine4::invertible() const { return std::abs(det3()) > kSingularDetThreshold; }

Affine4 Affine4::inverse() const {
  const double det = det3();
  if (!(std::abs(det) > kSingularDetThreshold)) {
    throw Error(ErrorCode::SingularAffine, fmt::format("3x3 block determinant {:.3g}", det));
  }
  const Mat3 inv = linear().inverse();
  return from_linear(inv, -inv * offset());
}

Vec3 Affine4::column_norms() const {
  const Mat3 l = linear();
  return {l.col(0).norm(), l.col(1).norm(), l.col(2).norm()};
}

Affine4 compose(const Affine4& a, const Affine4& b) {
  Mat4 m = a.matrix() * b.matrix();
  // Keep the homogeneous row exact regardless of rounding in the product.
  m.row(3) << 0.0, 0.0, 0.0, 1.0;
  return Affine4(m);
}

Affine4 invert(const Affine4& a) { return a.inverse(); }

VoxelGrid::VoxelGrid(Dims dims, Affine4 affine)
    : dims_(dims), affine_(std::move(affine)), inverse_(affine_.inverse()), spacing_(affine_.column_norms()) {
  if (dims_.nx < 1 || dims_.ny < 1 || dims_.nz < 1) {
    throw Error(ErrorCode::InvalidGrid, fmt::format("dims must be >= 1, got {}x{}x{}", dims_.nx, dims_.ny, dims_.nz));
  }
}

Vec3 VoxelGrid::slice_normal() const {
  const Mat3 l = affine_.linear();
  return l.col(0).cross(l.col(1)).normalized();
}

bool VoxelGrid::same_geometry(const VoxelGrid& other, double tol) const {
  if (!(dims_ == other.dims_)) return false;
  return (affine_.matrix() - other.affine_.matrix()).cwiseAbs().maxCoeff() <= tol;
}

PhysicalPoint voxel_to_world(const VoxelCoord& p, const VoxelGrid& g) {
  return PhysicalPoint(g.affine().apply(p.vec()));
}

VoxelCoord world_to_voxel(const PhysicalPoint& q, const VoxelGrid& g) {
  return VoxelCoord(g.inverse_affine().apply(q.vec()));
}

}  // namespace rvseg
