#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rvseg/metrics.hpp"
#include "rvseg/nifti.hpp"

namespace rvseg {

/// "SA_ED", "LA_ES", ...
std::string slot_name(Phase p, View v);

/// Four optional paths indexed by (phase, view).
class SlotPaths {
 public:
  const std::optional<std::filesystem::path>& get(Phase p, View v) const { return paths_[index(p, v)]; }
  void set(Phase p, View v, std::filesystem::path path) { paths_[index(p, v)] = std::move(path); }

 private:
  static std::size_t index(Phase p, View v) { return static_cast<std::size_t>(p) * 2 + static_cast<std::size_t>(v); }
  std::array<std::optional<std::filesystem::path>, 4> paths_{};
};

struct CaseEntry {
  std::string case_id;
  Pathology pathology = Pathology::Normal;
  SlotPaths images;
  SlotPaths labels;
  SlotPaths predictions;
};

/// JSON case list. Relative paths resolve against the manifest's directory.
struct CaseManifest {
  nifti::LabelLayout label_layout = nifti::LabelLayout::Challenge;
  std::vector<CaseEntry> cases;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Throws Error(BadManifest) on malformed JSON, duplicate case ids, unknown
/// pathologies or slot names, and empty or NUL-containing paths.
CaseManifest load_manifest(const std::filesystem::path& path);
CaseManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
std::string manifest_to_json(const CaseManifest& m);

}  // namespace rvseg
