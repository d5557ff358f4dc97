#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "rvseg/error.hpp"
#include "rvseg/nifti.hpp"
#include "test_support.hpp"

using namespace rvseg;
namespace nii = rvseg::nifti;

namespace {

constexpr nii::Datatype kAllTypes[] = {nii::Datatype::UInt8, nii::Datatype::Int16, nii::Datatype::Int32,
                                       nii::Datatype::Float32, nii::Datatype::Float64};

nii::Image random_image(std::mt19937_64& rng, Dims d, nii::Datatype dt, const Affine4& affine) {
  nii::Image img{nii::make_header(VoxelGrid(d, affine), dt), {}};
  img.payload.resize(d.count() * static_cast<std::size_t>(nii::bits_per_voxel(dt) / 8));
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : img.payload) b = static_cast<std::byte>(byte(rng));
  return img;
}

void write_bytes(const std::filesystem::path& p, std::span<const std::byte> bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
void poke(std::vector<std::byte>& bytes, std::size_t offset, T value) {
  std::memcpy(bytes.data() + offset, &value, sizeof(T));
}

ErrorCode decode_error(std::span<const std::byte> bytes) {
  try {
    nii::decode(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode did not throw";
  return ErrorCode::IoFailure;
}

nii::Header bare_header(Dims d) {
  nii::Header h;
  h.dim = {3, static_cast<std::int16_t>(d.nx), static_cast<std::int16_t>(d.ny), static_cast<std::int16_t>(d.nz),
           1, 1, 1, 1};
  h.datatype = static_cast<std::int16_t>(nii::Datatype::UInt8);
  h.bitpix = 8;
  h.vox_offset = 352.0f;
  h.pixdim = {1.0f, 1.0f, 1.0f, 1.0f, 0.0f, 0.0f, 0.0f, 0.0f};
  return h;
}

}  // namespace

TEST(NiftiRoundTrip, EveryDatatypeBitIdentical) {
  test::TempDir dir("nifti_rt");
  std::mt19937_64 rng(101);
  for (nii::Datatype dt : kAllTypes) {
    for (const char* ext : {".nii", ".nii.gz"}) {
      const Affine4 affine = nii::storable_affine(test::random_affine(rng));
      const nii::Image img = random_image(rng, {7, 5, 3}, dt, affine);
      const auto path = dir / (std::to_string(static_cast<int>(dt)) + ext);
      nii::write_image(path, img);
      const nii::Image back = nii::read_image(path);
      EXPECT_EQ(back.payload, img.payload) << "datatype " << static_cast<int>(dt) << ext;
      EXPECT_EQ(back.header.datatype, img.header.datatype);
      const Affine4 got = nii::resolve_affine(back.header).affine;
      EXPECT_LE((got.matrix() - affine.matrix()).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(NiftiRoundTrip, SmallestUInt8Volume) {
  test::TempDir dir("nifti_one");
  const LabelVolume v(test::iso_grid({1, 1, 1}), {kRv});
  nii::write_labels(dir / "one.nii", v, nii::LabelLayout::Internal);
  const auto [h, back] = nii::read_labels(dir / "one.nii", nii::LabelLayout::Internal);
  EXPECT_EQ(back.dims(), (Dims{1, 1, 1}));
  EXPECT_EQ(back[0], kRv);
  EXPECT_EQ(h.sform_code, 1);
}

TEST(NiftiRoundTrip, RandomInt16Volume) {
  test::TempDir dir("nifti_i16");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> val(-32768, 32767);
  const VoxelGrid g({17, 19, 5}, nii::storable_affine(test::random_affine(rng)));
  std::vector<double> data(g.dims().count());
  for (auto& x : data) x = val(rng);
  const IntensityVolume v(g, data);
  nii::write_intensity(dir / "v.nii.gz", v, nii::Datatype::Int16);
  const auto [h, back] = nii::read_intensity(dir / "v.nii.gz");
  EXPECT_EQ(h.datatype, static_cast<std::int16_t>(nii::Datatype::Int16));
  EXPECT_TRUE(std::equal(back.data().begin(), back.data().end(), data.begin()));
  EXPECT_LE((back.grid().affine().matrix() - g.affine().matrix()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(NiftiRoundTrip, RandomLabelsBothLayouts) {
  test::TempDir dir("nifti_lbl");
  std::mt19937_64 rng(9);
  const VoxelGrid g({12, 9, 4}, nii::storable_affine(test::random_affine(rng)));
  const LabelVolume v = test::random_labels(rng, g, 0.6);
  for (auto layout : {nii::LabelLayout::Internal, nii::LabelLayout::Challenge}) {
    nii::write_labels(dir / "l.nii.gz", v, layout);
    const auto back = nii::read_labels(dir / "l.nii.gz", layout).second;
    EXPECT_TRUE(std::equal(back.data().begin(), back.data().end(), v.data().begin()));
  }
}

TEST(NiftiDecode, BigEndianMatchesLittleEndian) {
  std::mt19937_64 rng(13);
  for (nii::Datatype dt : kAllTypes) {
    const nii::Image img = random_image(rng, {4, 3, 2}, dt, nii::storable_affine(test::random_affine(rng)));
    const auto big = nii::encode(img, std::endian::big);
    const auto little = nii::encode(img, std::endian::little);
    if (nii::bits_per_voxel(dt) > 8) EXPECT_NE(big, little);
    const nii::Image a = nii::decode(big);
    const nii::Image b = nii::decode(little);
    EXPECT_EQ(a.payload, img.payload);
    EXPECT_EQ(b.payload, img.payload);
    EXPECT_EQ(a.header.srow_y, img.header.srow_y);
    EXPECT_EQ(a.header.dim, img.header.dim);
  }
}

TEST(NiftiDecode, GzipDetectedByMagicNotExtension) {
  test::TempDir dir("nifti_gz");
  std::mt19937_64 rng(3);
  const nii::Image img = random_image(rng, {3, 3, 3}, nii::Datatype::UInt8, Affine4::identity());
  const auto packed = nii::gzip(nii::encode(img));
  ASSERT_EQ(packed[0], std::byte{0x1f});
  ASSERT_EQ(packed[1], std::byte{0x8b});
  write_bytes(dir / "disguised.nii", packed);
  EXPECT_EQ(nii::read_image(dir / "disguised.nii").payload, img.payload);
}

TEST(NiftiDecode, GzipIsDeterministicAndReversible) {
  std::vector<std::byte> data(5000);
  for (std::size_t n = 0; n < data.size(); ++n) data[n] = static_cast<std::byte>((n * 31) % 251);
  EXPECT_EQ(nii::gzip(data), nii::gzip(data));
  EXPECT_EQ(nii::gunzip(nii::gzip(data)), data);
}

TEST(NiftiDecode, BadMagic) {
  std::mt19937_64 rng(1);
  auto bytes = nii::encode(random_image(rng, {2, 2, 2}, nii::Datatype::UInt8, Affine4::identity()));
  bytes[344] = std::byte{'x'};
  EXPECT_EQ(decode_error(bytes), ErrorCode::BadMagic);
}

TEST(NiftiDecode, BadEndianness) {
  std::mt19937_64 rng(1);
  auto bytes = nii::encode(random_image(rng, {2, 2, 2}, nii::Datatype::UInt8, Affine4::identity()));
  poke<std::int32_t>(bytes, 0, 349);
  EXPECT_EQ(decode_error(bytes), ErrorCode::BadEndianness);
}

TEST(NiftiDecode, TruncatedPayload) {
  std::mt19937_64 rng(1);
  auto bytes = nii::encode(random_image(rng, {4, 4, 4}, nii::Datatype::Int16, Affine4::identity()));
  bytes.resize(bytes.size() - 1);
  EXPECT_EQ(decode_error(bytes), ErrorCode::TruncatedData);
  bytes.resize(100);
  EXPECT_EQ(decode_error(bytes), ErrorCode::TruncatedData);
}

TEST(NiftiDecode, UnsupportedDatatype) {
  std::mt19937_64 rng(1);
  auto bytes = nii::encode(random_image(rng, {2, 2, 2}, nii::Datatype::Int16, Affine4::identity()));
  poke<std::int16_t>(bytes, 70, 512);  // uint16
  EXPECT_EQ(decode_error(bytes), ErrorCode::UnsupportedDatatype);
}

TEST(NiftiDecode, MalformedDimsAndOffset) {
  std::mt19937_64 rng(1);
  const auto good = nii::encode(random_image(rng, {2, 2, 2}, nii::Datatype::UInt8, Affine4::identity()));
  auto bad_rank = good;
  poke<std::int16_t>(bad_rank, 40, 7);
  EXPECT_EQ(decode_error(bad_rank), ErrorCode::BadHeader);
  auto zero_dim = good;
  poke<std::int16_t>(zero_dim, 44, 0);
  EXPECT_EQ(decode_error(zero_dim), ErrorCode::BadHeader);
  auto low_offset = good;
  poke<float>(low_offset, 108, 300.0f);
  EXPECT_EQ(decode_error(low_offset), ErrorCode::BadHeader);
  auto bitpix = good;
  poke<std::int16_t>(bitpix, 72, 16);
  EXPECT_EQ(decode_error(bitpix), ErrorCode::BadHeader);
}

TEST(NiftiDecode, ExtensionBytesSkipped) {
  std::mt19937_64 rng(2);
  const nii::Image img = random_image(rng, {3, 2, 2}, nii::Datatype::UInt8, Affine4::identity());
  const auto bytes = nii::encode(img);
  // Re-home the payload at offset 368 behind a dummy extension block.
  std::vector<std::byte> ext(bytes.begin(), bytes.begin() + 352);
  ext[348] = std::byte{1};
  ext.resize(368, std::byte{0x5a});
  ext.insert(ext.end(), bytes.begin() + 352, bytes.end());
  poke<float>(ext, 108, 368.0f);
  EXPECT_EQ(nii::decode(ext).payload, img.payload);
}

TEST(NiftiDecode, HeaderImagePair) {
  test::TempDir dir("nifti_pair");
  std::mt19937_64 rng(4);
  const nii::Image img = random_image(rng, {5, 4, 3}, nii::Datatype::Int32, nii::storable_affine(test::random_affine(rng)));
  auto bytes = nii::encode(img);
  std::vector<std::byte> hdr(bytes.begin(), bytes.begin() + 348);
  hdr[344] = std::byte{'n'};
  hdr[345] = std::byte{'i'};
  hdr[346] = std::byte{'1'};
  poke<float>(hdr, 108, 0.0f);
  write_bytes(dir / "pair.hdr", hdr);
  write_bytes(dir / "pair.img", std::span(bytes).subspan(352));
  const nii::Image back = nii::read_image(dir / "pair.hdr");
  EXPECT_EQ(back.payload, img.payload);
  EXPECT_TRUE(back.header.is_pair_file());
  EXPECT_THROW(nii::decode(hdr), Error);
}

TEST(NiftiDecode, FourDimensionalFramesSplit) {
  nii::Header h = bare_header({2, 2, 1});
  h.dim[0] = 4;
  h.dim[4] = 3;
  nii::Image img{h, std::vector<std::byte>(12)};
  for (std::size_t n = 0; n < 12; ++n) img.payload[n] = static_cast<std::byte>(n / 4);
  const nii::Image decoded = nii::decode(nii::encode(img));
  EXPECT_EQ(decoded.header.frames(), 3);
  for (int f = 0; f < 3; ++f) {
    const LabelVolume v = nii::decode_labels(decoded, nii::LabelLayout::Internal, f);
    EXPECT_EQ(count_label(v, static_cast<Label>(f)), 4u);
  }
  EXPECT_THROW(nii::decode_labels(decoded, nii::LabelLayout::Internal, 3), Error);
}

TEST(NiftiLabels, ChallengeLayoutMergesLv) {
  nii::Image img{bare_header({4, 1, 1}), {std::byte{0}, std::byte{1}, std::byte{2}, std::byte{3}}};
  const LabelVolume v = nii::decode_labels(img, nii::LabelLayout::Challenge);
  EXPECT_EQ(v[0], kBackground);
  EXPECT_EQ(v[1], kLv);
  EXPECT_EQ(v[2], kLv);
  EXPECT_EQ(v[3], kRv);
  const nii::Image out = nii::encode_labels(v, nii::LabelLayout::Challenge);
  EXPECT_EQ(out.payload, (std::vector<std::byte>{std::byte{0}, std::byte{1}, std::byte{1}, std::byte{3}}));
}

TEST(NiftiLabels, RejectsOutOfVocabularyValues) {
  nii::Image challenge{bare_header({2, 1, 1}), {std::byte{0}, std::byte{4}}};
  EXPECT_THROW(nii::decode_labels(challenge, nii::LabelLayout::Challenge), Error);
  nii::Image internal{bare_header({2, 1, 1}), {std::byte{0}, std::byte{3}}};
  try {
    nii::decode_labels(internal, nii::LabelLayout::Internal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidLabel);
  }
}

TEST(NiftiIntensity, SlopeAndInterceptApplied) {
  nii::Header h = bare_header({2, 1, 1});
  h.scl_slope = 2.0f;
  h.scl_inter = -1.0f;
  const IntensityVolume v = nii::decode_intensity({h, {std::byte{3}, std::byte{10}}});
  EXPECT_DOUBLE_EQ(v[0], 5.0);
  EXPECT_DOUBLE_EQ(v[1], 19.0);
}

TEST(NiftiIntensity, IntegerTargetsRejectUnrepresentableValues) {
  const IntensityVolume frac(test::iso_grid({2, 1, 1}), {1.5, 2.0});
  EXPECT_THROW(nii::encode_intensity(frac, nii::Datatype::Int16), Error);
  const IntensityVolume big(test::iso_grid({1, 1, 1}), {300.0});
  EXPECT_THROW(nii::encode_intensity(big, nii::Datatype::UInt8), Error);
}

TEST(NiftiHeader, DimsOverflow) {
  try {
    nii::make_header(VoxelGrid({70000, 1, 1}, Affine4::identity()), nii::Datatype::UInt8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimsOverflow);
  }
}

TEST(NiftiHeader, WritesSformOnly) {
  const nii::Header h = nii::make_header(VoxelGrid({4, 4, 4}, Affine4::translation(1, 2, 3)), nii::Datatype::Int16);
  EXPECT_EQ(h.sform_code, 1);
  EXPECT_EQ(h.qform_code, 0);
  EXPECT_EQ(h.vox_offset, 352.0f);
  EXPECT_EQ(h.bitpix, 16);
  EXPECT_EQ(h.srow_x[3], 1.0f);
}

TEST(ResolveAffine, SformIdentityRows) {
  nii::Header h = bare_header({2, 2, 2});
  h.sform_code = 1;
  h.srow_x = {1, 0, 0, 0};
  h.srow_y = {0, 1, 0, 0};
  h.srow_z = {0, 0, 1, 0};
  const auto r = nii::resolve_affine(h);
  EXPECT_EQ(r.source, nii::AffineSource::Sform);
  EXPECT_EQ(r.affine.matrix(), Mat4::Identity());
  EXPECT_FALSE(r.fallback_warning);
}

TEST(ResolveAffine, SformWinsOverQform) {
  nii::Header h = bare_header({2, 2, 2});
  h.sform_code = 2;
  h.srow_x = {2, 0, 0, 5};
  h.srow_y = {0, 2, 0, 6};
  h.srow_z = {0, 0, 2, 7};
  h.qform_code = 1;
  h.quatern_b = 0.5f;
  h.qoffset_x = 100.0f;
  const auto r = nii::resolve_affine(h);
  EXPECT_EQ(r.source, nii::AffineSource::Sform);
  EXPECT_EQ(r.affine.offset(), Vec3(5, 6, 7));
}

TEST(ResolveAffine, QformNoRotation) {
  nii::Header h = bare_header({2, 2, 2});
  h.qform_code = 1;
  h.pixdim = {1.0f, 1.25f, 1.25f, 10.0f, 0, 0, 0, 0};
  const auto r = nii::resolve_affine(h);
  EXPECT_EQ(r.source, nii::AffineSource::Qform);
  Mat4 want = Mat4::Identity();
  want(0, 0) = 1.25;
  want(1, 1) = 1.25;
  want(2, 2) = 10.0;
  EXPECT_LE((r.affine.matrix() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ResolveAffine, QfacFlipsThirdColumn) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    nii::Header h = bare_header({2, 2, 2});
    h.qform_code = 1;
    Eigen::Quaterniond q(std::abs(n(rng)), n(rng), n(rng), n(rng));
    q.normalize();
    h.quatern_b = static_cast<float>(q.x());
    h.quatern_c = static_cast<float>(q.y());
    h.quatern_d = static_cast<float>(q.z());
    h.pixdim = {1.0f, 0.9f, 1.1f, 6.0f, 0, 0, 0, 0};
    h.qoffset_x = 3.0f;
    const Mat4 plus = nii::resolve_affine(h).affine.matrix();
    h.pixdim[0] = -1.0f;
    const Mat4 minus = nii::resolve_affine(h).affine.matrix();
    EXPECT_EQ(minus.col(0), plus.col(0));
    EXPECT_EQ(minus.col(1), plus.col(1));
    EXPECT_EQ(minus.col(2), (-plus.col(2)).eval());
    EXPECT_EQ(minus.col(3), plus.col(3));
  }
}

TEST(ResolveAffine, QfacZeroReadsAsPlusOne) {
  nii::Header h = bare_header({2, 2, 2});
  h.pixdim[0] = 0.0f;
  EXPECT_EQ(h.qfac(), 1.0);
}

TEST(ResolveAffine, PixdimFallbackFlagged) {
  nii::Header h = bare_header({2, 2, 2});
  h.pixdim = {1.0f, 2.0f, 3.0f, 0.0f, 0, 0, 0, 0};
  const auto r = nii::resolve_affine(h);
  EXPECT_EQ(r.source, nii::AffineSource::PixdimFallback);
  EXPECT_TRUE(r.fallback_warning);
  EXPECT_EQ(r.affine.linear().diagonal(), Vec3(2, 3, 1));
}

TEST(QuaternionRotation, OrthonormalForRandomUnitQuaternions) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> sp(0.5, 5.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    if (q.w() < 0) q.coeffs() *= -1.0;
    nii::Header h = bare_header({2, 2, 2});
    h.qform_code = 1;
    h.quatern_b = static_cast<float>(q.x());
    h.quatern_c = static_cast<float>(q.y());
    h.quatern_d = static_cast<float>(q.z());
    const double qfac = t % 2 == 0 ? 1.0 : -1.0;
    h.pixdim = {static_cast<float>(qfac), static_cast<float>(sp(rng)), static_cast<float>(sp(rng)),
                static_cast<float>(sp(rng)), 0, 0, 0, 0};
    const Mat3 lin = nii::resolve_affine(h).affine.linear();
    const Vec3 scale(h.pixdim[1], h.pixdim[2], h.pixdim[3] * qfac);
    const Mat3 r = lin * scale.cwiseInverse().asDiagonal();
    EXPECT_LE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-6);
  }
}

TEST(QuaternionRotation, MatchesEigenForUnitQuaternion) {
  Eigen::Quaterniond q(0.8, 0.2, -0.5, 0.1);
  q.normalize();
  const Mat3 r = nii::quaternion_rotation(q.x(), q.y(), q.z());
  EXPECT_LE((r - q.toRotationMatrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(QuaternionRotation, HalfTurnWhenVectorPartIsUnit) {
  const Mat3 r = nii::quaternion_rotation(0.0, 0.0, 1.0);
  const Mat3 want = Vec3(-1, -1, 1).asDiagonal();
  EXPECT_LE((r - want).cwiseAbs().maxCoeff(), 1e-12);
}
