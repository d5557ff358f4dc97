#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rvseg/nifti.hpp"
#include "rvseg/transition.hpp"

namespace rvseg::cli::detail {

using json = nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);
void ensure_parent(const std::filesystem::path& path);

std::string_view layout_name(nifti::LabelLayout layout);

/// Transition parameters for a given LA header; `slab_mm` is a full thickness.
TransitionParams transition_params(const nifti::Header& la_header, std::optional<double> slab_mm, double margin_mm,
                                   int rv_threshold);

json roi_to_json(const RoiSpec& roi);
RoiSpec roi_from_json(const json& j);

json params_to_json(const TransitionParams& p);

}  // namespace rvseg::cli::detail
