#include "common.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg::cli::detail {

void ensure_parent(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw Error(ErrorCode::IoFailure, fmt::format("cannot create '{}': {}", parent.string(), ec.message()));
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("write failed on '{}'", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view layout_name(nifti::LabelLayout layout) {
  return layout == nifti::LabelLayout::Challenge ? "challenge" : "internal";
}

TransitionParams transition_params(const nifti::Header& la_header, std::optional<double> slab_mm, double margin_mm,
                                   int rv_threshold) {
  TransitionParams p;
  p.slab_halfwidth_mm = slab_mm ? 0.5 * *slab_mm : default_slab_halfwidth(la_header.pixdim[3]);
  p.margin_mm = margin_mm;
  p.slice_rv_threshold_vox = rv_threshold;
  p.validate();
  return p;
}

json roi_to_json(const RoiSpec& roi) {
  json j;
  j["bbox"] = {roi.bbox.i.lo, roi.bbox.i.hi, roi.bbox.j.lo, roi.bbox.j.hi, roi.bbox.k.lo, roi.bbox.k.hi};
  j["rv_slices"] = {roi.rv_slices.lo, roi.rv_slices.hi};
  j["margin_mm"] = roi.margin_mm;
  return j;
}

RoiSpec roi_from_json(const json& j) {
  try {
    const auto b = j.at("bbox").get<std::vector<int>>();
    const auto r = j.at("rv_slices").get<std::vector<int>>();
    if (b.size() != 6 || r.size() != 2) throw Error(ErrorCode::BadManifest, "bbox needs 6 and rv_slices 2 entries");
    RoiSpec roi;
    roi.bbox = {{b[0], b[1]}, {b[2], b[3]}, {b[4], b[5]}};
    roi.rv_slices = {r[0], r[1]};
    roi.margin_mm = j.at("margin_mm").get<double>();
    return roi;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadManifest, fmt::format("malformed ROI JSON: {}", e.what()));
  }
}

json params_to_json(const TransitionParams& p) {
  json j;
  j["slab_halfwidth_mm"] = p.slab_halfwidth_mm;
  j["slice_rv_threshold_vox"] = p.slice_rv_threshold_vox;
  j["margin_mm"] = p.margin_mm;
  return j;
}

}  // namespace rvseg::cli::detail
