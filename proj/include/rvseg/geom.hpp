#pragma once

#include <cstddef>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace rvseg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Three doubles tagged with the space they live in, so voxel and physical
/// coordinates cannot be mixed up silently.
template <class Tag>
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Point3() = default;
  constexpr Point3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  explicit Point3(const Vec3& v) : x(v.x()), y(v.y()), z(v.z()) {}

  Vec3 vec() const { return {x, y, z}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PhysicalTag {};
struct VoxelTag {};

/// Millimetres in the scanner frame.
using PhysicalPoint = Point3<PhysicalTag>;
/// Continuous voxel index; integer values are voxel centres.
using VoxelCoord = Point3<VoxelTag>;

/// Homogeneous 4x4 voxel-to-physical transform. The bottom row is always
/// exactly (0,0,0,1); invertibility is checked where an inverse is needed.
class Affine4 {
 public:
  Affine4() : m_(Mat4::Identity()) {}
  explicit Affine4(const Mat4& m);

  static Affine4 identity() { return {}; }
  static Affine4 translation(double tx, double ty, double tz);
  static Affine4 from_linear(const Mat3& linear, const Vec3& offset);

  const Mat4& matrix() const { return m_; }
  Mat3 linear() const { return m_.topLeftCorner<3, 3>(); }
  Vec3 offset() const { return m_.topRightCorner<3, 1>(); }

  Vec3 apply(const Vec3& p) const { return m_.topLeftCorner<3, 3>() * p + m_.topRightCorner<3, 1>(); }

  double det3() const { return linear().determinant(); }
  bool invertible() const;

  /// Throws Error(SingularAffine) when |det| of the 3x3 block is <= 1e-9.
  Affine4 inverse() const;

  /// Euclidean norms of the first three columns (voxel spacing in mm).
  Vec3 column_norms() const;

 private:
  Mat4 m_;
};

/// compose(a, b)(p) == a(b(p)).
Affine4 compose(const Affine4& a, const Affine4& b);
Affine4 invert(const Affine4& a);

inline constexpr double kSingularDetThreshold = 1e-9;

struct Dims {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  // x runs fastest, matching the NIfTI payload order.
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz;
  }
  int operator[](int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// A sampling lattice in physical space: dimensions plus voxel-to-world affine.
/// Construction rejects non-positive dims and singular affines, so every grid
/// can map in both directions.
class VoxelGrid {
 public:
  VoxelGrid(Dims dims, Affine4 affine);

  const Dims& dims() const { return dims_; }
  const Affine4& affine() const { return affine_; }
  const Affine4& inverse_affine() const { return inverse_; }
  const Vec3& spacing() const { return spacing_; }

  bool is_single_slice() const { return dims_.nz == 1; }

  /// Unit normal of the constant-k planes (cross product of the i and j columns).
  Vec3 slice_normal() const;

  bool same_geometry(const VoxelGrid& other, double tol = 0.0) const;

 private:
  Dims dims_;
  Affine4 affine_;
  Affine4 inverse_;
  Vec3 spacing_;
};

PhysicalPoint voxel_to_world(const VoxelCoord& p, const VoxelGrid& g);
VoxelCoord world_to_voxel(const PhysicalPoint& q, const VoxelGrid& g);

}  // namespace rvseg
