#include <gtest/gtest.h>

#include <limits>

#include "rvseg/error.hpp"
#include "rvseg/volume.hpp"
#include "test_support.hpp"

using namespace rvseg;

TEST(LabelVolume, ZeroFilledByDefault) {
  const LabelVolume v(test::iso_grid({3, 4, 5}));
  EXPECT_EQ(v.size(), 60u);
  EXPECT_EQ(count_label(v, kBackground), 60u);
}

TEST(LabelVolume, RejectsWrongLength) {
  try {
    LabelVolume v(test::iso_grid({2, 2, 2}), std::vector<Label>(7, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(LabelVolume, RejectsUnknownLabel) {
  std::vector<Label> data(8, 0);
  data[5] = 3;
  try {
    LabelVolume v(test::iso_grid({2, 2, 2}), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidLabel);
  }
}

TEST(IntensityVolume, RejectsNonFinite) {
  std::vector<double> data(8, 1.0);
  data[2] = std::numeric_limits<double>::infinity();
  try {
    IntensityVolume v(test::iso_grid({2, 2, 2}), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidValue);
  }
}

TEST(LabelVolume, AtFollowsIndexOrder) {
  std::vector<Label> data(24, 0);
  data[Dims{4, 3, 2}.index(2, 1, 1)] = kRv;
  const LabelVolume v(test::iso_grid({4, 3, 2}), data);
  EXPECT_EQ(v.at(2, 1, 1), kRv);
  EXPECT_EQ(count_label(v, kRv), 1u);
}

TEST(LabelVolume, WithGridKeepsData) {
  std::mt19937_64 rng(1);
  const auto v = test::random_labels(rng, test::iso_grid({5, 5, 5}));
  const auto w = v.with_grid(test::iso_grid({5, 5, 5}, 2.0));
  EXPECT_TRUE(std::equal(v.data().begin(), v.data().end(), w.data().begin()));
  EXPECT_DOUBLE_EQ(w.grid().spacing().x(), 2.0);
  EXPECT_THROW(v.with_grid(test::iso_grid({5, 5, 4})), Error);
}

TEST(ErrorCodes, GeometryClassification) {
  EXPECT_TRUE(is_geometry_error(ErrorCode::SingularAffine));
  EXPECT_TRUE(is_geometry_error(ErrorCode::NoOverlap));
  EXPECT_TRUE(is_geometry_error(ErrorCode::RoiOutOfBounds));
  EXPECT_FALSE(is_geometry_error(ErrorCode::BadMagic));
  EXPECT_FALSE(is_geometry_error(ErrorCode::BadManifest));
  EXPECT_FALSE(is_geometry_error(ErrorCode::ShapeMismatch));
}

TEST(ErrorCodes, MessageCarriesCodeName) {
  const Error e(ErrorCode::TruncatedData, "short payload");
  EXPECT_EQ(std::string(e.what()), std::string(to_string(ErrorCode::TruncatedData)) + ": short payload");
}
