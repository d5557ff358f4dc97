#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "rvseg/cli.hpp"
#include "rvseg/error.hpp"
#include "rvseg/manifest.hpp"
#include "rvseg/phantom.hpp"

namespace rvseg::cli {
namespace {

using detail::json;

json vec_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec_from_json(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(ErrorCode::BadManifest, fmt::format("'{}' needs 3 numbers", what));
  return {v[0], v[1], v[2]};
}

json ellipsoid_to_json(const Ellipsoid& e) {
  json j;
  j["center"] = vec_to_json(e.center);
  j["semi_axes"] = vec_to_json(e.semi_axes);
  j["rotation"] = json::array();
  for (int r = 0; r < 3; ++r) j["rotation"].push_back(vec_to_json(e.rotation.row(r).transpose()));
  return j;
}

Ellipsoid ellipsoid_from_json(const json& j) {
  Ellipsoid e;
  e.center = vec_from_json(j.at("center"), "center");
  e.semi_axes = vec_from_json(j.at("semi_axes"), "semi_axes");
  if (j.contains("rotation")) {
    const auto& rows = j.at("rotation");
    if (!rows.is_array() || rows.size() != 3) throw Error(ErrorCode::BadManifest, "'rotation' needs 3 rows");
    for (int r = 0; r < 3; ++r) e.rotation.row(r) = vec_from_json(rows[static_cast<std::size_t>(r)], "rotation").transpose();
  }
  return e;
}

json spec_to_json(const PhantomSpec& s) {
  json j;
  j["lv"] = ellipsoid_to_json(s.lv);
  j["rv"] = ellipsoid_to_json(s.rv);
  j["seed"] = s.seed;
  return j;
}

PhantomSpec spec_from_json(const json& j) {
  try {
    PhantomSpec s;
    s.lv = ellipsoid_from_json(j.at("lv"));
    s.rv = ellipsoid_from_json(j.at("rv"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadManifest, fmt::format("malformed phantom spec: {}", e.what()));
  }
}

// Sampling on the float-rounded grid keeps the written labels consistent
// with the header they are read back with.
VoxelGrid float_rounded(const VoxelGrid& g) { return VoxelGrid(g.dims(), nifti::storable_affine(g.affine())); }

std::uint64_t case_seed(std::uint64_t seed, int index) {
  // splitmix64 step keeps neighbouring seeds from sharing cases.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PhantomSpec overgrown_rv(const PhantomSpec& s) {
  PhantomSpec p = s;
  p.rv.semi_axes.z() *= 1.25;
  return p;
}

PhantomSpec inflated_rv(const PhantomSpec& s) {
  PhantomSpec p = s;
  p.rv.semi_axes.x() *= 1.05;
  p.rv.semi_axes.y() *= 1.05;
  return p;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void cmd_transform(const TransformOptions& o) {
  auto [src_header, src] = nifti::read_labels(o.src, o.layout);
  const nifti::Image dst_image = nifti::read_image(o.dst_grid);
  const VoxelGrid dst = nifti::grid_from_header(dst_image.header);

  if (o.direction == Direction::LaToSa && !src.grid().is_single_slice()) {
    spdlog::warn("la2sa: source has {} slices; treating it as a stack, no slab applied", src.dims().nz);
  }
  if (o.direction == Direction::SaToLa && src.grid().is_single_slice()) {
    spdlog::warn("sa2la: source is a single slice; slab membership applies");
  }

  const TransitionParams params = detail::transition_params(src_header, o.slab_mm, 0.0, 1);
  const LabelVolume out = transform_label(src, dst, params);
  spdlog::info("transform: {} of {} output voxels labelled", out.size() - count_label(out, kBackground), out.size());

  detail::ensure_parent(o.out);
  nifti::write_labels(o.out, out, o.layout, nifti::Datatype::UInt8, dst_image.header);
}

RoiSpec cmd_roi(const RoiOptions& o) {
  auto [la_header, la] = nifti::read_labels(o.la_label, o.layout);
  auto [sa_header, sa] = nifti::read_intensity(o.sa_image);

  const TransitionParams params = detail::transition_params(la_header, o.slab_mm, o.margin_mm, o.rv_threshold);
  const LabelVolume transformed = transform_label(la, sa.grid(), params);
  const RoiSpec roi = derive_roi(transformed, params);

  json j = detail::roi_to_json(roi);
  j["sa_dims"] = {sa.dims().nx, sa.dims().ny, sa.dims().nz};
  j["parameters"] = detail::params_to_json(params);
  j["version"] = std::string(toolkit_version());
  detail::write_text(o.out_json, j.dump(2) + "\n");

  if (o.crop_out) {
    detail::ensure_parent(*o.crop_out);
    nifti::write_intensity(*o.crop_out, crop_to_roi(sa, roi), nifti::Datatype::Float32, sa_header);
  }
  return roi;
}

void cmd_phantom(const PhantomOptions& o) {
  if (o.n_cases < 1) throw Error(ErrorCode::InvalidValue, fmt::format("--n-cases must be >= 1, got {}", o.n_cases));

  std::optional<PhantomSpec> fixed;
  if (o.spec_json) {
    try {
      fixed = spec_from_json(json::parse(detail::read_text(*o.spec_json)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::BadManifest, fmt::format("invalid spec JSON: {}", e.what()));
    }
  }

  CaseManifest manifest;
  manifest.label_layout = nifti::LabelLayout::Challenge;
  manifest.base_dir = o.out_dir;

  for (int c = 0; c < o.n_cases; ++c) {
    const std::string id = fmt::format("phantom_{:03d}", c);
    const PhantomScene scene = fixed ? scene_for(*fixed) : random_scene(case_seed(o.seed, c));
    const VoxelGrid sa_grid = float_rounded(scene.sa_grid);
    const VoxelGrid la_grid = float_rounded(scene.la_grid);
    std::filesystem::create_directories(o.out_dir / id);

    CaseEntry entry;
    entry.case_id = id;
    entry.pathology = kAllPathologies[static_cast<std::size_t>(c) % kAllPathologies.size()];

    for (Phase phase : {Phase::ED, Phase::ES}) {
      const PhantomSpec& spec = phase == Phase::ED ? scene.ed : scene.es;
      for (View view : {View::SA, View::LA}) {
        const VoxelGrid& grid = view == View::SA ? sa_grid : la_grid;
        const std::string stem = lower(slot_name(phase, view));
        const std::filesystem::path rel_image = std::filesystem::path(id) / (stem + "_image.nii.gz");
        const std::filesystem::path rel_label = std::filesystem::path(id) / (stem + "_label.nii.gz");

        const LabelVolume labels = sample_grid(spec, grid);
        nifti::write_intensity(o.out_dir / rel_image, synthesize_intensity(labels), nifti::Datatype::Int16);
        nifti::write_labels(o.out_dir / rel_label, labels, nifti::LabelLayout::Challenge);
        entry.images.set(phase, view, rel_image);
        entry.labels.set(phase, view, rel_label);

        switch (o.predictions) {
          case PredictionMode::Copy:
            entry.predictions.set(phase, view, rel_label);
            break;
          case PredictionMode::Perturbed: {
            const std::filesystem::path rel_pred = std::filesystem::path(id) / (stem + "_pred.nii.gz");
            const PhantomSpec wrong = view == View::SA ? overgrown_rv(spec) : inflated_rv(spec);
            nifti::write_labels(o.out_dir / rel_pred, sample_grid(wrong, grid), nifti::LabelLayout::Challenge);
            entry.predictions.set(phase, view, rel_pred);
            break;
          }
          case PredictionMode::None:
            break;
        }
      }
    }

    json spec = spec_to_json(scene.ed);
    spec["es"] = spec_to_json(scene.es);
    detail::write_text(o.out_dir / id / "spec.json", spec.dump(2) + "\n");
    manifest.cases.push_back(std::move(entry));
  }

  detail::write_text(o.out_dir / "manifest.json", manifest_to_json(manifest));
  spdlog::info("phantom: wrote {} case(s) to {}", o.n_cases, o.out_dir.string());
}

void cmd_report(const ReportOptions& o, std::ostream& out) {
  json doc;
  try {
    doc = json::parse(detail::read_text(o.in_json));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadManifest, fmt::format("invalid report JSON: {}", e.what()));
  }
  if (!doc.contains("by_pathology") || !doc.contains("by_phase")) {
    throw Error(ErrorCode::BadManifest, "not an eval report (missing by_pathology/by_phase)");
  }

  auto cell = [](const json& row, const char* metric) -> std::string {
    if (!row.contains(metric) || row[metric].is_null()) return "n/a";
    return row[metric].value("cell", std::string("n/a"));
  };
  auto table = [&](const char* first, const json& rows) {
    out << fmt::format("| {} | DS_SA | HD_SA (mm) | DS_LA | HD_LA (mm) |\n", first);
    out << "|---|---|---|---|---|\n";
    for (const auto& row : rows) {
      out << fmt::format("| {} | {} | {} | {} | {} |\n", row.value("group", std::string()), cell(row, "DS_SA"),
                         cell(row, "HD_SA"), cell(row, "DS_LA"), cell(row, "HD_LA"));
    }
  };

  out << "Per pathology\n\n";
  table("Pathology", doc["by_pathology"]);
  out << "\nPer phase\n\n";
  table("Phase", doc["by_phase"]);
  if (doc.contains("score") && doc["score"].is_object() && doc["score"].contains("mean")) {
    out << fmt::format("\nChallenge score: {} (n = {})\n", doc["score"].value("cell", std::string("n/a")),
                       doc["score"].value("count", 0));
  }
}

}  // namespace rvseg::cli
