#pragma once

#include <cstdint>

#include "rvseg/geom.hpp"
#include "rvseg/volume.hpp"

namespace rvseg {

struct Ellipsoid {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Ones();
  /// Columns are the ellipsoid axes in world coordinates.
  Mat3 rotation = Mat3::Identity();

  /// Closed surface: points with normalized radius exactly 1 are inside.
  bool contains(const Vec3& q) const;
};

/// Two-ellipsoid heart: LV wins where the two overlap.
struct PhantomSpec {
  Ellipsoid lv;
  Ellipsoid rv;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidValue) on non-positive semi-axes, non-orthonormal
  /// rotations (1e-9) or coincident centres.
  void validate() const;
};

Label label_at(const PhantomSpec& spec, const PhysicalPoint& q);
LabelVolume sample_grid(const PhantomSpec& spec, const VoxelGrid& grid);

/// Piecewise-constant intensity image for a label volume.
IntensityVolume synthesize_intensity(const LabelVolume& labels);

/// One phantom case: ED and ES hearts with matching SA stack and LA plane.
struct PhantomScene {
  PhantomSpec ed;
  PhantomSpec es;
  VoxelGrid sa_grid;
  VoxelGrid la_grid;
};

struct SceneGeometry {
  Dims sa_dims{96, 96, 12};
  Vec3 sa_spacing{1.25, 1.25, 10.0};
  Dims la_dims{96, 96, 1};
  Vec3 la_spacing{1.25, 1.25, 8.0};
  /// Rotation of the LA in-plane axis about the long axis.
  double la_angle_deg = 0.0;
};

/// Grids fitted to `ed`: the SA stack is perpendicular to the LV long axis
/// (third rotation column) and centred between the ventricles; the LA plane
/// contains the long axis and the LV-to-RV direction.
PhantomScene scene_for(const PhantomSpec& ed, const SceneGeometry& geometry = {});

/// End-systolic contraction of an end-diastolic heart.
PhantomSpec contract(const PhantomSpec& ed);

/// Fixed oblique reference heart.
PhantomSpec default_phantom_spec();

/// Deterministic jittered heart (centres, sizes, orientation) plus a small
/// random LA plane angle.
PhantomScene random_scene(std::uint64_t seed);

}  // namespace rvseg
