#include "rvseg/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 axis_angle(const Vec3& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * kDeg, axis.normalized()).toRotationMatrix();
}

// Base oblique heart orientation: long axis tilted away from the scanner z axis.
Mat3 reference_orientation() {
  return axis_angle(Vec3::UnitZ(), 35.0) * axis_angle(Vec3::UnitX(), -50.0) * axis_angle(Vec3::UnitY(), 20.0);
}

VoxelGrid centred_grid(const Dims& dims, const Mat3& axes, const Vec3& spacing, const Vec3& centre) {
  const Mat3 lin = axes * spacing.asDiagonal();
  const Vec3 mid(0.5 * (dims.nx - 1), 0.5 * (dims.ny - 1), 0.5 * (dims.nz - 1));
  return VoxelGrid(dims, Affine4::from_linear(lin, centre - lin * mid));
}

void validate_ellipsoid(const Ellipsoid& e, const char* name) {
  if (!e.center.allFinite() || !e.semi_axes.allFinite() || !e.rotation.allFinite()) {
    throw Error(ErrorCode::InvalidValue, fmt::format("{} ellipsoid has non-finite parameters", name));
  }
  if ((e.semi_axes.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidValue, fmt::format("{} semi-axes must be > 0", name));
  }
  const double err = (e.rotation.transpose() * e.rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-9) {
    throw Error(ErrorCode::InvalidValue, fmt::format("{} rotation is not orthonormal (error {:.3g})", name, err));
  }
}

}  // namespace

bool Ellipsoid::contains(const Vec3& q) const {
  const Vec3 local = rotation.transpose() * (q - center);
  return local.cwiseQuotient(semi_axes).squaredNorm() <= 1.0;
}

void PhantomSpec::validate() const {
  validate_ellipsoid(lv, "LV");
  validate_ellipsoid(rv, "RV");
  if (lv.center == rv.center) throw Error(ErrorCode::InvalidValue, "LV and RV centres coincide");
}

Label label_at(const PhantomSpec& spec, const PhysicalPoint& q) {
  const Vec3 p = q.vec();
  if (spec.lv.contains(p)) return kLv;
  if (spec.rv.contains(p)) return kRv;
  return kBackground;
}

LabelVolume sample_grid(const PhantomSpec& spec, const VoxelGrid& grid) {
  spec.validate();
  const Dims& d = grid.dims();
  std::vector<Label> data(d.count());
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        data[d.index(i, j, k)] = label_at(spec, voxel_to_world(VoxelCoord(i, j, k), grid));
      }
    }
  }
  return LabelVolume(grid, std::move(data));
}

IntensityVolume synthesize_intensity(const LabelVolume& labels) {
  std::vector<double> data(labels.size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    switch (labels[n]) {
      case kLv: data[n] = 180.0; break;
      case kRv: data[n] = 140.0; break;
      default: data[n] = 20.0; break;
    }
  }
  return IntensityVolume(labels.grid(), std::move(data));
}

PhantomScene scene_for(const PhantomSpec& ed, const SceneGeometry& geometry) {
  ed.validate();
  const Vec3 h = ed.lv.rotation.col(2).normalized();
  Vec3 u = ed.rv.center - ed.lv.center;
  u -= u.dot(h) * h;
  if (u.norm() < 1e-6) {
    throw Error(ErrorCode::InvalidValue, "RV centre lies on the LV long axis; LA plane is undefined");
  }
  u.normalize();
  const Vec3 v = h.cross(u);
  const Vec3 centre = 0.5 * (ed.lv.center + ed.rv.center);

  Mat3 sa_axes;
  sa_axes << u, v, h;
  const Vec3 w = axis_angle(h, geometry.la_angle_deg) * u;
  Mat3 la_axes;
  la_axes << w, h, w.cross(h);

  return PhantomScene{ed, contract(ed), centred_grid(geometry.sa_dims, sa_axes, geometry.sa_spacing, centre),
                      centred_grid(geometry.la_dims, la_axes, geometry.la_spacing, centre)};
}

PhantomSpec contract(const PhantomSpec& ed) {
  PhantomSpec es = ed;
  es.lv.semi_axes = ed.lv.semi_axes.cwiseProduct(Vec3(0.8, 0.8, 0.9));
  es.rv.semi_axes = ed.rv.semi_axes.cwiseProduct(Vec3(0.85, 0.85, 0.9));
  return es;
}

PhantomSpec default_phantom_spec() {
  const Mat3 frame = reference_orientation();
  const Vec3 centre(12.0, -18.0, 25.0);
  PhantomSpec s;
  s.lv.rotation = frame;
  s.lv.center = centre + frame * Vec3(-10.0, 0.0, -5.0);
  s.lv.semi_axes = Vec3(22.0, 22.0, 42.0);
  s.rv.rotation = frame;
  s.rv.center = centre + frame * Vec3(28.0, 0.0, 8.0);
  s.rv.semi_axes = Vec3(18.0, 28.0, 36.0);
  return s;
}

PhantomScene random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Each draw is a separate statement so the sequence is fixed.
  auto jitter = [&](double amp) { return amp * unit(rng); };
  auto scale = [&](double rel) { return 1.0 + rel * unit(rng); };
  auto draw3 = [&](double ax, double ay, double az) {
    const double x = jitter(ax);
    const double y = jitter(ay);
    const double z = jitter(az);
    return Vec3(x, y, z);
  };

  const Vec3 tilt_axis = draw3(1.0, 1.0, 1.0) + Vec3(0.0, 0.0, 1e-3);
  const double tilt = jitter(15.0);
  const Mat3 frame = axis_angle(tilt_axis, tilt) * reference_orientation();
  const Vec3 centre = draw3(15.0, 15.0, 15.0);

  PhantomSpec s;
  s.seed = seed;
  s.lv.rotation = frame * axis_angle(Vec3::UnitZ(), jitter(20.0));
  s.lv.center = centre + frame * (Vec3(-10.0, 0.0, -5.0) + draw3(3.0, 2.0, 4.0));
  {
    const double a = scale(0.12), b = scale(0.12), c = scale(0.1);
    s.lv.semi_axes = Vec3(22.0 * a, 22.0 * b, 42.0 * c);
  }
  s.rv.rotation = frame * axis_angle(Vec3::UnitZ(), jitter(20.0));
  s.rv.center = centre + frame * (Vec3(28.0, 0.0, 8.0) + draw3(3.0, 2.0, 5.0));
  {
    const double a = scale(0.12), b = scale(0.12), c = scale(0.1);
    s.rv.semi_axes = Vec3(18.0 * a, 28.0 * b, 36.0 * c);
  }

  SceneGeometry geometry;
  geometry.la_angle_deg = jitter(8.0);
  return scene_for(s, geometry);
}

}  // namespace rvseg
