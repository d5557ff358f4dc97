#pragma once

// NIfTI-1 single-file (.nii / .nii.gz) reader and writer.
//
// Payloads are held in native byte order after decoding; big-endian files are
// swapped on read and every file is written little-endian. Header extensions
// are skipped on read and written as a zero extender.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvseg/geom.hpp"
#include "rvseg/volume.hpp"

namespace rvseg::nifti {

inline constexpr std::int32_t kHeaderSize = 348;
inline constexpr std::size_t kSingleFileOffset = 352;

enum class Datatype : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
};

bool is_supported_datatype(std::int16_t code);
int bits_per_voxel(Datatype dt);

/// All NIfTI-1 header fields, in file order.
struct Header {
  std::int32_t sizeof_hdr = kHeaderSize;
  std::array<char, 10> data_type{};
  std::array<char, 18> db_name{};
  std::int32_t extents = 0;
  std::int16_t session_error = 0;
  char regular = 0;
  char dim_info = 0;
  std::array<std::int16_t, 8> dim{};
  float intent_p1 = 0.0f;
  float intent_p2 = 0.0f;
  float intent_p3 = 0.0f;
  std::int16_t intent_code = 0;
  std::int16_t datatype = 0;
  std::int16_t bitpix = 0;
  std::int16_t slice_start = 0;
  std::array<float, 8> pixdim{};
  float vox_offset = 0.0f;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  std::int16_t slice_end = 0;
  char slice_code = 0;
  char xyzt_units = 0;
  float cal_max = 0.0f;
  float cal_min = 0.0f;
  float slice_duration = 0.0f;
  float toffset = 0.0f;
  std::int32_t glmax = 0;
  std::int32_t glmin = 0;
  std::array<char, 80> descrip{};
  std::array<char, 24> aux_file{};
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  float quatern_b = 0.0f;
  float quatern_c = 0.0f;
  float quatern_d = 0.0f;
  float qoffset_x = 0.0f;
  float qoffset_y = 0.0f;
  float qoffset_z = 0.0f;
  std::array<float, 4> srow_x{};
  std::array<float, 4> srow_y{};
  std::array<float, 4> srow_z{};
  std::array<char, 16> intent_name{};
  std::array<char, 4> magic{'n', '+', '1', '\0'};

  /// pixdim[0] normalised to -1 or +1 (0 reads as +1).
  double qfac() const { return pixdim[0] < 0.0f ? -1.0 : 1.0; }
  Dims spatial_dims() const;
  int frames() const;
  bool is_pair_file() const;  // "ni1\0"
};

/// Header plus the voxel payload of every frame, native byte order.
struct Image {
  Header header;
  std::vector<std::byte> payload;
};

enum class AffineSource { Sform, Qform, PixdimFallback };

struct ResolvedAffine {
  Affine4 affine;
  AffineSource source = AffineSource::Sform;
  /// Set when neither sform nor qform was usable.
  bool fallback_warning = false;
};

/// sform if sform_code > 0, else qform if qform_code > 0, else diag(pixdim).
ResolvedAffine resolve_affine(const Header& h);

/// Rotation from the stored quaternion (b, c, d), with a recovered as
/// sqrt(1 - b^2 - c^2 - d^2).
Mat3 quaternion_rotation(double b, double c, double d);

VoxelGrid grid_from_header(const Header& h);

/// The affine as an sform stores it: entries rounded to float32.
Affine4 storable_affine(const Affine4& a);

/// Fresh header for `grid`, copying descriptive fields from `tmpl`.
/// Writes sform (code 1), clears qform, sets pixdim to the column norms.
Header make_header(const VoxelGrid& grid, Datatype dt, const Header& tmpl = {});

Image decode(std::span<const std::byte> bytes);
std::vector<std::byte> encode(const Image& img, std::endian order = std::endian::little);

/// Reads .nii, .nii.gz (detected by the gzip magic, not the extension) and
/// .hdr/.img pairs.
Image read_image(const std::filesystem::path& path);
/// Gzip-compresses when the path ends in ".gz".
void write_image(const std::filesystem::path& path, const Image& img);

std::vector<std::byte> gunzip(std::span<const std::byte> bytes);
std::vector<std::byte> gzip(std::span<const std::byte> bytes);

/// How label values are stored on disk.
///   Internal:  {0, 1 = LV, 2 = RV}
///   Challenge: {0, 1 = LV cavity, 2 = LV myocardium, 3 = RV}; cavity and
///              myocardium merge to LV on read, LV is written back as 1.
enum class LabelLayout { Internal, Challenge };

IntensityVolume decode_intensity(const Image& img, int frame = 0);
LabelVolume decode_labels(const Image& img, LabelLayout layout, int frame = 0);

Image encode_intensity(const IntensityVolume& v, Datatype dt, const Header& tmpl = {});
Image encode_labels(const LabelVolume& v, LabelLayout layout, Datatype dt = Datatype::UInt8,
                    const Header& tmpl = {});

std::pair<Header, IntensityVolume> read_intensity(const std::filesystem::path& path, int frame = 0);
std::pair<Header, LabelVolume> read_labels(const std::filesystem::path& path, LabelLayout layout, int frame = 0);

void write_intensity(const std::filesystem::path& path, const IntensityVolume& v, Datatype dt = Datatype::Float32,
                     const Header& tmpl = {});
void write_labels(const std::filesystem::path& path, const LabelVolume& v, LabelLayout layout,
                  Datatype dt = Datatype::UInt8, const Header& tmpl = {});

}  // namespace rvseg::nifti
