#include "rvseg/nifti.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <type_traits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <zlib.h>

#include "rvseg/error.hpp"

namespace rvseg::nifti {
namespace {

constexpr std::array<char, 4> kMagicSingle{'n', '+', '1', '\0'};
constexpr std::array<char, 4> kMagicPair{'n', 'i', '1', '\0'};
constexpr int kMaxHeaderDim = std::numeric_limits<std::int16_t>::max();

// Visits every header field with its byte offset in the 348-byte layout.
template <class H, class F>
void for_each_field(H& h, F&& f) {
  f(0, h.sizeof_hdr);
  f(4, h.data_type);
  f(14, h.db_name);
  f(32, h.extents);
  f(36, h.session_error);
  f(38, h.regular);
  f(39, h.dim_info);
  f(40, h.dim);
  f(56, h.intent_p1);
  f(60, h.intent_p2);
  f(64, h.intent_p3);
  f(68, h.intent_code);
  f(70, h.datatype);
  f(72, h.bitpix);
  f(74, h.slice_start);
  f(76, h.pixdim);
  f(108, h.vox_offset);
  f(112, h.scl_slope);
  f(116, h.scl_inter);
  f(120, h.slice_end);
  f(122, h.slice_code);
  f(123, h.xyzt_units);
  f(124, h.cal_max);
  f(128, h.cal_min);
  f(132, h.slice_duration);
  f(136, h.toffset);
  f(140, h.glmax);
  f(144, h.glmin);
  f(148, h.descrip);
  f(228, h.aux_file);
  f(252, h.qform_code);
  f(254, h.sform_code);
  f(256, h.quatern_b);
  f(260, h.quatern_c);
  f(264, h.quatern_d);
  f(268, h.qoffset_x);
  f(272, h.qoffset_y);
  f(276, h.qoffset_z);
  f(280, h.srow_x);
  f(296, h.srow_y);
  f(312, h.srow_z);
  f(328, h.intent_name);
  f(344, h.magic);
}

template <class T>
T load(const std::byte* p, bool swap) {
  std::array<std::byte, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if (swap) std::reverse(buf.begin(), buf.end());
  return std::bit_cast<T>(buf);
}

template <class T>
void store(std::byte* p, T value, bool swap) {
  auto buf = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
  if (swap) std::reverse(buf.begin(), buf.end());
  std::memcpy(p, buf.data(), sizeof(T));
}

template <class T>
struct is_std_array : std::false_type {};
template <class T, std::size_t N>
struct is_std_array<std::array<T, N>> : std::true_type {};

struct FieldReader {
  const std::byte* base;
  bool swap;
  template <class T>
  void operator()(std::size_t off, T& field) const {
    if constexpr (is_std_array<T>::value) {
      using E = typename T::value_type;
      for (std::size_t n = 0; n < field.size(); ++n) field[n] = load<E>(base + off + n * sizeof(E), swap);
    } else {
      field = load<T>(base + off, swap);
    }
  }
};

struct FieldWriter {
  std::byte* base;
  bool swap;
  template <class T>
  void operator()(std::size_t off, const T& field) const {
    if constexpr (is_std_array<T>::value) {
      using E = typename T::value_type;
      for (std::size_t n = 0; n < field.size(); ++n) store<E>(base + off + n * sizeof(E), field[n], swap);
    } else {
      store<T>(base + off, field, swap);
    }
  }
};

void swap_elements(std::span<std::byte> data, std::size_t width) {
  if (width <= 1) return;
  for (std::size_t i = 0; i + width <= data.size(); i += width) {
    std::reverse(data.begin() + static_cast<std::ptrdiff_t>(i), data.begin() + static_cast<std::ptrdiff_t>(i + width));
  }
}

struct DecodedHeader {
  Header header;
  bool swap = false;
};

DecodedHeader decode_header(std::span<const std::byte> bytes) {
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize)) {
    throw Error(ErrorCode::TruncatedData, fmt::format("{} bytes is shorter than a NIfTI-1 header", bytes.size()));
  }
  bool swap = false;
  if (load<std::int32_t>(bytes.data(), false) == kHeaderSize) {
    swap = false;
  } else if (load<std::int32_t>(bytes.data(), true) == kHeaderSize) {
    swap = true;
  } else {
    throw Error(ErrorCode::BadEndianness, "sizeof_hdr is not 348 in either byte order");
  }

  DecodedHeader out;
  out.swap = swap;
  for_each_field(out.header, FieldReader{bytes.data(), swap});
  const Header& h = out.header;

  if (h.magic != kMagicSingle && h.magic != kMagicPair) {
    throw Error(ErrorCode::BadMagic, "magic is neither \"n+1\" nor \"ni1\"");
  }
  if (h.dim[0] < 2 || h.dim[0] > 4) {
    throw Error(ErrorCode::BadHeader, fmt::format("dim[0] = {} (expected 2, 3 or 4)", h.dim[0]));
  }
  for (int a = 1; a <= h.dim[0]; ++a) {
    if (h.dim[a] < 1) throw Error(ErrorCode::BadHeader, fmt::format("dim[{}] = {}", a, h.dim[a]));
  }
  if (!is_supported_datatype(h.datatype)) {
    throw Error(ErrorCode::UnsupportedDatatype, fmt::format("datatype code {}", h.datatype));
  }
  if (h.bitpix != bits_per_voxel(static_cast<Datatype>(h.datatype))) {
    throw Error(ErrorCode::BadHeader, fmt::format("bitpix {} does not match datatype {}", h.bitpix, h.datatype));
  }
  if (!std::isfinite(h.vox_offset) || h.vox_offset < 0.0f || std::floor(h.vox_offset) != h.vox_offset) {
    throw Error(ErrorCode::BadHeader, fmt::format("vox_offset {}", h.vox_offset));
  }
  if (h.magic == kMagicSingle && h.vox_offset < static_cast<float>(kSingleFileOffset)) {
    throw Error(ErrorCode::BadHeader, fmt::format("vox_offset {} < 352 in a single-file image", h.vox_offset));
  }
  return out;
}

std::size_t payload_bytes(const Header& h) {
  const Dims d = h.spatial_dims();
  return d.count() * static_cast<std::size_t>(h.frames()) * static_cast<std::size_t>(h.bitpix / 8);
}

std::vector<std::byte> extract_payload(const DecodedHeader& dh, std::span<const std::byte> data) {
  const auto offset = static_cast<std::size_t>(dh.header.vox_offset);
  const std::size_t need = payload_bytes(dh.header);
  if (data.size() < offset || data.size() - offset < need) {
    throw Error(ErrorCode::TruncatedData,
                fmt::format("payload needs {} bytes at offset {}, file has {}", need, offset, data.size()));
  }
  std::vector<std::byte> payload(data.begin() + static_cast<std::ptrdiff_t>(offset),
                                 data.begin() + static_cast<std::ptrdiff_t>(offset + need));
  if (dh.swap) swap_elements(payload, static_cast<std::size_t>(dh.header.bitpix / 8));
  return payload;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}'", path.string()));
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, fmt::format("read failed on '{}'", path.string()));
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

bool is_gzip(std::span<const std::byte> bytes) {
  return bytes.size() >= 2 && bytes[0] == std::byte{0x1f} && bytes[1] == std::byte{0x8b};
}

std::vector<std::byte> maybe_gunzip(std::vector<std::byte> bytes) {
  return is_gzip(bytes) ? gunzip(bytes) : bytes;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::filesystem::path pair_data_path(const std::filesystem::path& hdr) {
  std::string s = hdr.string();
  if (ends_with(s, ".hdr.gz")) return s.substr(0, s.size() - 7) + ".img.gz";
  if (ends_with(s, ".hdr")) return s.substr(0, s.size() - 4) + ".img";
  throw Error(ErrorCode::BadHeader, fmt::format("'{}' has \"ni1\" magic but no .hdr extension", s));
}

template <class T>
double load_voxel(const std::byte* base, std::size_t idx) {
  return static_cast<double>(load<T>(base + idx * sizeof(T), false));
}

double voxel_as_double(Datatype dt, const std::byte* base, std::size_t idx) {
  switch (dt) {
    case Datatype::UInt8: return load_voxel<std::uint8_t>(base, idx);
    case Datatype::Int16: return load_voxel<std::int16_t>(base, idx);
    case Datatype::Int32: return load_voxel<std::int32_t>(base, idx);
    case Datatype::Float32: return load_voxel<float>(base, idx);
    case Datatype::Float64: return load_voxel<double>(base, idx);
  }
  throw Error(ErrorCode::UnsupportedDatatype, "unreachable datatype");
}

template <class T>
void store_integral(std::byte* base, std::size_t idx, double v) {
  if (std::floor(v) != v || v < static_cast<double>(std::numeric_limits<T>::lowest()) ||
      v > static_cast<double>(std::numeric_limits<T>::max())) {
    throw Error(ErrorCode::InvalidValue, fmt::format("value {} does not fit the output datatype", v));
  }
  store<T>(base + idx * sizeof(T), static_cast<T>(v), false);
}

void store_voxel(Datatype dt, std::byte* base, std::size_t idx, double v) {
  switch (dt) {
    case Datatype::UInt8: store_integral<std::uint8_t>(base, idx, v); return;
    case Datatype::Int16: store_integral<std::int16_t>(base, idx, v); return;
    case Datatype::Int32: store_integral<std::int32_t>(base, idx, v); return;
    case Datatype::Float32: store<float>(base + idx * sizeof(float), static_cast<float>(v), false); return;
    case Datatype::Float64: store<double>(base + idx * sizeof(double), v, false); return;
  }
}

const std::byte* frame_base(const Image& img, int frame) {
  const Header& h = img.header;
  if (frame < 0 || frame >= h.frames()) {
    throw Error(ErrorCode::InvalidValue, fmt::format("frame {} requested, image has {}", frame, h.frames()));
  }
  const std::size_t frame_bytes = h.spatial_dims().count() * static_cast<std::size_t>(h.bitpix / 8);
  if (img.payload.size() < frame_bytes * static_cast<std::size_t>(h.frames())) {
    throw Error(ErrorCode::TruncatedData, "payload shorter than header dims");
  }
  return img.payload.data() + frame_bytes * static_cast<std::size_t>(frame);
}

Label map_stored_label(double stored, LabelLayout layout) {
  if (std::floor(stored) == stored) {
    const auto v = static_cast<long long>(stored);
    if (layout == LabelLayout::Internal && v >= 0 && v <= kMaxLabel) return static_cast<Label>(v);
    if (layout == LabelLayout::Challenge) {
      switch (v) {
        case 0: return kBackground;
        case 1:
        case 2: return kLv;
        case 3: return kRv;
        default: break;
      }
    }
  }
  throw Error(ErrorCode::InvalidLabel, fmt::format("stored label value {} not valid for the {} layout", stored,
                                                   layout == LabelLayout::Internal ? "internal" : "challenge"));
}

double unmap_label(Label l, LabelLayout layout) {
  if (layout == LabelLayout::Challenge && l == kRv) return 3.0;
  return static_cast<double>(l);
}

}  // namespace

bool is_supported_datatype(std::int16_t code) {
  switch (static_cast<Datatype>(code)) {
    case Datatype::UInt8:
    case Datatype::Int16:
    case Datatype::Int32:
    case Datatype::Float32:
    case Datatype::Float64:
      return true;
  }
  return false;
}

int bits_per_voxel(Datatype dt) {
  switch (dt) {
    case Datatype::UInt8: return 8;
    case Datatype::Int16: return 16;
    case Datatype::Int32: return 32;
    case Datatype::Float32: return 32;
    case Datatype::Float64: return 64;
  }
  return 0;
}

Dims Header::spatial_dims() const {
  return {dim[1], dim[2], dim[0] >= 3 ? dim[3] : 1};
}

int Header::frames() const { return dim[0] == 4 ? dim[4] : 1; }

bool Header::is_pair_file() const { return magic == kMagicPair; }

Mat3 quaternion_rotation(double b, double c, double d) {
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    // |(b,c,d)| >= 1 up to float rounding: renormalise and use a 180 degree rotation.
    const double s = 1.0 / std::sqrt(b * b + c * c + d * d);
    b *= s;
    c *= s;
    d *= s;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  Mat3 r;
  r << a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c),
      2.0 * (b * c + a * d), a * a + c * c - b * b - d * d, 2.0 * (c * d - a * b),
      2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a + d * d - c * c - b * b;
  return r;
}

ResolvedAffine resolve_affine(const Header& h) {
  if (h.sform_code > 0) {
    Mat4 m = Mat4::Identity();
    for (int c = 0; c < 4; ++c) {
      m(0, c) = h.srow_x[static_cast<std::size_t>(c)];
      m(1, c) = h.srow_y[static_cast<std::size_t>(c)];
      m(2, c) = h.srow_z[static_cast<std::size_t>(c)];
    }
    return {Affine4(m), AffineSource::Sform, false};
  }

  auto spacing = [&](int axis) {
    const double v = h.pixdim[static_cast<std::size_t>(axis)];
    return v > 0.0 ? v : 1.0;
  };

  if (h.qform_code > 0) {
    spdlog::info("sform_code is 0; using qform (code {})", h.qform_code);
    const Mat3 r = quaternion_rotation(h.quatern_b, h.quatern_c, h.quatern_d);
    const Vec3 scale(spacing(1), spacing(2), spacing(3) * h.qfac());
    return {Affine4::from_linear(r * scale.asDiagonal(), Vec3(h.qoffset_x, h.qoffset_y, h.qoffset_z)),
            AffineSource::Qform, false};
  }

  spdlog::warn("neither sform nor qform set; falling back to diag(pixdim)");
  const Vec3 scale(spacing(1), spacing(2), spacing(3));
  return {Affine4::from_linear(Mat3(scale.asDiagonal()), Vec3::Zero()), AffineSource::PixdimFallback, true};
}

VoxelGrid grid_from_header(const Header& h) { return VoxelGrid(h.spatial_dims(), resolve_affine(h).affine); }

Affine4 storable_affine(const Affine4& a) {
  Mat4 m = a.matrix();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      // volatile: GCC 11 at -O3 vectorises this loop and drops the narrowing.
      volatile float f = static_cast<float>(m(r, c));
      m(r, c) = f;
    }
  }
  return Affine4(m);
}

Header make_header(const VoxelGrid& grid, Datatype dt, const Header& tmpl) {
  const Dims& d = grid.dims();
  for (int a = 0; a < 3; ++a) {
    if (d[a] > kMaxHeaderDim) {
      throw Error(ErrorCode::DimsOverflow, fmt::format("dim {} = {} exceeds the int16 header field", a, d[a]));
    }
  }

  Header h = tmpl;
  h.sizeof_hdr = kHeaderSize;
  h.magic = kMagicSingle;
  h.extents = 0;
  h.regular = 'r';
  h.dim = {3, static_cast<std::int16_t>(d.nx), static_cast<std::int16_t>(d.ny), static_cast<std::int16_t>(d.nz),
           1, 1, 1, 1};
  h.datatype = static_cast<std::int16_t>(dt);
  h.bitpix = static_cast<std::int16_t>(bits_per_voxel(dt));
  h.vox_offset = static_cast<float>(kSingleFileOffset);
  h.scl_slope = 0.0f;
  h.scl_inter = 0.0f;
  h.cal_min = 0.0f;
  h.cal_max = 0.0f;
  h.glmax = 0;
  h.glmin = 0;
  if (h.xyzt_units == 0) h.xyzt_units = 2 | 8;  // mm, s

  const Vec3& sp = grid.spacing();
  h.pixdim[0] = 1.0f;
  for (int a = 0; a < 3; ++a) h.pixdim[static_cast<std::size_t>(a + 1)] = static_cast<float>(sp[a]);

  h.qform_code = 0;
  h.quatern_b = h.quatern_c = h.quatern_d = 0.0f;
  h.qoffset_x = h.qoffset_y = h.qoffset_z = 0.0f;

  h.sform_code = 1;
  const Mat4& m = grid.affine().matrix();
  for (std::size_t c = 0; c < 4; ++c) {
    h.srow_x[c] = static_cast<float>(m(0, static_cast<Eigen::Index>(c)));
    h.srow_y[c] = static_cast<float>(m(1, static_cast<Eigen::Index>(c)));
    h.srow_z[c] = static_cast<float>(m(2, static_cast<Eigen::Index>(c)));
  }
  return h;
}

Image decode(std::span<const std::byte> bytes) {
  const DecodedHeader dh = decode_header(bytes);
  if (dh.header.is_pair_file()) {
    throw Error(ErrorCode::BadMagic, "\"ni1\" header needs its .img file; use read_image");
  }
  return {dh.header, extract_payload(dh, bytes)};
}

std::vector<std::byte> encode(const Image& img, std::endian order) {
  Header h = img.header;
  h.magic = kMagicSingle;
  h.vox_offset = static_cast<float>(kSingleFileOffset);
  if (!is_supported_datatype(h.datatype)) {
    throw Error(ErrorCode::UnsupportedDatatype, fmt::format("datatype code {}", h.datatype));
  }
  const std::size_t need = payload_bytes(h);
  if (img.payload.size() != need) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("payload is {} bytes, header implies {}", img.payload.size(), need));
  }

  const bool swap = order != std::endian::native;
  std::vector<std::byte> out(kSingleFileOffset + need, std::byte{0});
  for_each_field(h, FieldWriter{out.data(), swap});
  std::copy(img.payload.begin(), img.payload.end(), out.begin() + static_cast<std::ptrdiff_t>(kSingleFileOffset));
  if (swap) {
    swap_elements(std::span(out).subspan(kSingleFileOffset), static_cast<std::size_t>(h.bitpix / 8));
  }
  return out;
}

std::vector<std::byte> gunzip(std::span<const std::byte> bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) throw Error(ErrorCode::IoFailure, "inflateInit2 failed");

  std::vector<std::byte> out;
  std::array<unsigned char, 1 << 16> chunk{};
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());

  int rc = Z_OK;
  while (true) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    const std::size_t produced = chunk.size() - zs.avail_out;
    const auto* first = reinterpret_cast<const std::byte*>(chunk.data());
    out.insert(out.end(), first, first + produced);
    if (rc == Z_STREAM_END) {
      // Concatenated gzip members are legal; keep going if input remains.
      if (zs.avail_in == 0) break;
      inflateReset(&zs);
      continue;
    }
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) {
      inflateEnd(&zs);
      throw Error(ErrorCode::TruncatedData, "gzip stream ends prematurely");
    }
    if (rc != Z_OK) {
      inflateEnd(&zs);
      throw Error(ErrorCode::BadHeader, fmt::format("corrupt gzip stream (zlib code {})", rc));
    }
  }
  inflateEnd(&zs);
  return out;
}

std::vector<std::byte> gzip(std::span<const std::byte> bytes) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::IoFailure, "deflateInit2 failed");
  }
  std::vector<std::byte> out(deflateBound(&zs, static_cast<uLong>(bytes.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&zs);
    throw Error(ErrorCode::IoFailure, fmt::format("deflate failed (zlib code {})", rc));
  }
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

Image read_image(const std::filesystem::path& path) {
  const std::vector<std::byte> bytes = maybe_gunzip(read_file(path));
  const DecodedHeader dh = decode_header(bytes);
  if (!dh.header.is_pair_file()) return {dh.header, extract_payload(dh, bytes)};

  const std::vector<std::byte> data = maybe_gunzip(read_file(pair_data_path(path)));
  return {dh.header, extract_payload(dh, data)};
}

void write_image(const std::filesystem::path& path, const Image& img) {
  std::vector<std::byte> bytes = encode(img);
  if (ends_with(path.string(), ".gz")) bytes = gzip(bytes);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("write failed on '{}'", path.string()));
}

IntensityVolume decode_intensity(const Image& img, int frame) {
  const Header& h = img.header;
  const std::byte* base = frame_base(img, frame);
  const auto dt = static_cast<Datatype>(h.datatype);
  const bool scaled = h.scl_slope != 0.0f && std::isfinite(h.scl_slope) && std::isfinite(h.scl_inter);

  VoxelGrid grid = grid_from_header(h);
  std::vector<double> data(grid.dims().count());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double v = voxel_as_double(dt, base, n);
    data[n] = scaled ? v * h.scl_slope + h.scl_inter : v;
  }
  return IntensityVolume(std::move(grid), std::move(data));
}

LabelVolume decode_labels(const Image& img, LabelLayout layout, int frame) {
  const Header& h = img.header;
  const std::byte* base = frame_base(img, frame);
  const auto dt = static_cast<Datatype>(h.datatype);

  VoxelGrid grid = grid_from_header(h);
  std::vector<Label> data(grid.dims().count());
  for (std::size_t n = 0; n < data.size(); ++n) data[n] = map_stored_label(voxel_as_double(dt, base, n), layout);
  return LabelVolume(std::move(grid), std::move(data));
}

Image encode_intensity(const IntensityVolume& v, Datatype dt, const Header& tmpl) {
  Image img{make_header(v.grid(), dt, tmpl), {}};
  img.payload.resize(v.size() * static_cast<std::size_t>(bits_per_voxel(dt) / 8));
  for (std::size_t n = 0; n < v.size(); ++n) store_voxel(dt, img.payload.data(), n, v[n]);
  return img;
}

Image encode_labels(const LabelVolume& v, LabelLayout layout, Datatype dt, const Header& tmpl) {
  Image img{make_header(v.grid(), dt, tmpl), {}};
  img.payload.resize(v.size() * static_cast<std::size_t>(bits_per_voxel(dt) / 8));
  for (std::size_t n = 0; n < v.size(); ++n) store_voxel(dt, img.payload.data(), n, unmap_label(v[n], layout));
  return img;
}

std::pair<Header, IntensityVolume> read_intensity(const std::filesystem::path& path, int frame) {
  Image img = read_image(path);
  IntensityVolume v = decode_intensity(img, frame);
  return {std::move(img.header), std::move(v)};
}

std::pair<Header, LabelVolume> read_labels(const std::filesystem::path& path, LabelLayout layout, int frame) {
  Image img = read_image(path);
  LabelVolume v = decode_labels(img, layout, frame);
  return {std::move(img.header), std::move(v)};
}

void write_intensity(const std::filesystem::path& path, const IntensityVolume& v, Datatype dt, const Header& tmpl) {
  write_image(path, encode_intensity(v, dt, tmpl));
}

void write_labels(const std::filesystem::path& path, const LabelVolume& v, LabelLayout layout, Datatype dt,
                  const Header& tmpl) {
  write_image(path, encode_labels(v, layout, dt, tmpl));
}

}  // namespace rvseg::nifti
