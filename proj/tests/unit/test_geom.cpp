#include <gtest/gtest.h>

#include <limits>

#include "rvseg/error.hpp"
#include "rvseg/geom.hpp"
#include "test_support.hpp"

using namespace rvseg;

namespace {

VoxelGrid sa_like_grid() {
  Mat4 m = Mat4::Identity();
  m(0, 0) = 1.25;
  m(1, 1) = 1.25;
  m(2, 2) = 10.0;
  m(0, 3) = -100.0;
  m(1, 3) = -100.0;
  m(2, 3) = -50.0;
  return VoxelGrid({96, 96, 12}, Affine4(m));
}

void expect_point(const Vec3& got, const Vec3& want, double tol) {
  EXPECT_NEAR(got.x(), want.x(), tol);
  EXPECT_NEAR(got.y(), want.y(), tol);
  EXPECT_NEAR(got.z(), want.z(), tol);
}

}  // namespace

TEST(VoxelToWorld, IdentityMapsIndexToItself) {
  const VoxelGrid g({8, 8, 8}, Affine4::identity());
  const auto q = voxel_to_world({2, 3, 4}, g);
  EXPECT_EQ(q, PhysicalPoint(2, 3, 4));
}

TEST(VoxelToWorld, ScaledTranslatedOrigin) {
  const auto g = sa_like_grid();
  expect_point(voxel_to_world({0, 0, 0}, g).vec(), {-100, -100, -50}, 0.0);
  expect_point(voxel_to_world({1, 0, 0}, g).vec(), {-98.75, -100, -50}, 0.0);
}

TEST(VoxelToWorld, AcceptsOutOfGridCoordinates) {
  const auto g = sa_like_grid();
  expect_point(voxel_to_world({-0.5, 200, 12.5}, g).vec(), {-100.625, 150, 75}, 1e-12);
}

TEST(WorldToVoxel, IdentityMapsPointToItself) {
  const VoxelGrid g({8, 8, 8}, Affine4::identity());
  EXPECT_EQ(world_to_voxel({5, 5, 5}, g), VoxelCoord(5, 5, 5));
}

TEST(WorldToVoxel, RoundTripRandomAffines) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 150.0);
  double worst = 0.0;
  for (int a = 0; a < 20; ++a) {
    const VoxelGrid g({64, 64, 16}, test::random_affine(rng));
    for (int n = 0; n < 1000; ++n) {
      const VoxelCoord p(u(rng), u(rng), u(rng));
      const VoxelCoord back = world_to_voxel(voxel_to_world(p, g), g);
      worst = std::max(worst, (back.vec() - p.vec()).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(WorldToVoxel, IntegerIndicesRoundTrip) {
  std::mt19937_64 rng(5);
  const VoxelGrid g({10, 12, 7}, test::random_affine(rng));
  for (int k = 0; k < 7; ++k) {
    for (int j = 0; j < 12; ++j) {
      for (int i = 0; i < 10; ++i) {
        const VoxelCoord p(i, j, k);
        const VoxelCoord back = world_to_voxel(voxel_to_world(p, g), g);
        EXPECT_LT((back.vec() - p.vec()).cwiseAbs().maxCoeff(), 1e-6);
      }
    }
  }
}

TEST(VoxelGrid, ZeroThirdColumnIsSingular) {
  Mat4 m = Mat4::Identity();
  m(2, 2) = 0.0;
  const Affine4 degenerate(m);
  EXPECT_FALSE(degenerate.invertible());
  try {
    VoxelGrid g({4, 4, 1}, degenerate);
    FAIL() << "expected SingularAffine";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularAffine);
    EXPECT_TRUE(is_geometry_error(e.code()));
  }
}

TEST(VoxelGrid, RejectsNonPositiveDims) {
  for (Dims d : {Dims{0, 1, 1}, Dims{1, -2, 1}, Dims{1, 1, 0}}) {
    try {
      VoxelGrid g(d, Affine4::identity());
      FAIL() << "expected InvalidGrid";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidGrid);
    }
  }
}

TEST(VoxelGrid, SpacingIsColumnNorms) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const Affine4 a = test::random_affine(rng);
    const VoxelGrid g({2, 2, 2}, a);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(g.spacing()[c], a.linear().col(c).norm(), 1e-9);
    EXPECT_GT(g.spacing().minCoeff(), 0.0);
  }
}

TEST(VoxelGrid, SingleSliceAndNormal) {
  const VoxelGrid la({96, 96, 1}, Affine4::from_linear(Mat3::Identity() * 1.25, Vec3::Zero()));
  EXPECT_TRUE(la.is_single_slice());
  expect_point(la.slice_normal(), Vec3::UnitZ(), 1e-12);
  EXPECT_FALSE(sa_like_grid().is_single_slice());
}

TEST(Affine4, RejectsBadBottomRow) {
  Mat4 m = Mat4::Identity();
  m(3, 0) = 1e-3;
  EXPECT_THROW(Affine4{m}, Error);
}

TEST(Affine4, RejectsNonFinite) {
  Mat4 m = Mat4::Identity();
  m(0, 3) = std::numeric_limits<double>::quiet_NaN();
  try {
    Affine4 a(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidAffine);
  }
}

TEST(Affine4, InverseOfSingularThrows) {
  const Affine4 a = Affine4::from_linear(Mat3::Zero(), Vec3::Zero());
  EXPECT_THROW(a.inverse(), Error);
}

TEST(Affine4, DoubleInverseReproduces) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 100; ++n) {
    const Affine4 a = test::random_affine(rng);
    const Affine4 back = invert(invert(a));
    EXPECT_LE((back.matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(back.matrix().row(3), Eigen::RowVector4d(0, 0, 0, 1));
  }
}

TEST(Compose, WithInverseIsIdentity) {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 100; ++n) {
    const Affine4 a = test::random_affine(rng);
    const Affine4 id = compose(a, invert(a));
    EXPECT_LE((id.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Compose, TranslationsAdd) {
  const Affine4 c = compose(Affine4::translation(1, 0, 0), Affine4::translation(0, 2, 0));
  EXPECT_EQ(c.matrix(), Affine4::translation(1, 2, 0).matrix());
}

TEST(Compose, AppliesRightThenLeft) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int n = 0; n < 200; ++n) {
    const Affine4 a = test::random_affine(rng);
    const Affine4 b = test::random_affine(rng);
    const Vec3 p(u(rng), u(rng), u(rng));
    EXPECT_LT((compose(a, b).apply(p) - a.apply(b.apply(p))).norm(), 1e-9);
  }
}

TEST(Compose, Associative) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int n = 0; n < 200; ++n) {
    const Affine4 a = test::random_affine(rng);
    const Affine4 b = test::random_affine(rng);
    const Affine4 c = test::random_affine(rng);
    const Vec3 p(u(rng), u(rng), u(rng));
    EXPECT_LT((compose(compose(a, b), c).apply(p) - compose(a, compose(b, c)).apply(p)).norm(), 1e-9);
  }
}

TEST(Compose, KeepsExactBottomRow) {
  std::mt19937_64 rng(37);
  const Affine4 c = compose(test::random_affine(rng), test::random_affine(rng));
  EXPECT_EQ(c.matrix().row(3), Eigen::RowVector4d(0, 0, 0, 1));
}

TEST(Dims, IndexIsXFastest) {
  const Dims d{4, 3, 2};
  EXPECT_EQ(d.count(), 24u);
  EXPECT_EQ(d.index(0, 0, 0), 0u);
  EXPECT_EQ(d.index(1, 0, 0), 1u);
  EXPECT_EQ(d.index(0, 1, 0), 4u);
  EXPECT_EQ(d.index(0, 0, 1), 12u);
  EXPECT_EQ(d.index(3, 2, 1), 23u);
  EXPECT_TRUE(d.contains(3, 2, 1));
  EXPECT_FALSE(d.contains(4, 0, 0));
  EXPECT_FALSE(d.contains(0, -1, 0));
}
