#include "rvseg/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "rvseg/error.hpp"

namespace rvseg {
namespace {

using json = nlohmann::ordered_json;

constexpr Phase kPhases[] = {Phase::ED, Phase::ES};
constexpr View kViews[] = {View::SA, View::LA};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadManifest, what); }

SlotPaths parse_slots(const json& obj, const std::string& case_id, const char* field) {
  SlotPaths out;
  if (!obj.is_object()) bad(fmt::format("case '{}': '{}' must be an object", case_id, field));
  for (const auto& [key, value] : obj.items()) {
    bool matched = false;
    for (Phase p : kPhases) {
      for (View v : kViews) {
        if (key != slot_name(p, v)) continue;
        matched = true;
        if (!value.is_string()) bad(fmt::format("case '{}': {}.{} must be a string", case_id, field, key));
        const auto s = value.get<std::string>();
        if (s.empty() || s.find('\0') != std::string::npos) {
          bad(fmt::format("case '{}': {}.{} is not a valid path", case_id, field, key));
        }
        out.set(p, v, s);
      }
    }
    if (!matched) bad(fmt::format("case '{}': unknown slot '{}' in '{}' (expected SA_ED, SA_ES, LA_ED, LA_ES)", case_id, key, field));
  }
  return out;
}

json slots_to_json(const SlotPaths& s) {
  json out = json::object();
  for (View v : kViews) {
    for (Phase p : kPhases) {
      if (const auto& path = s.get(p, v)) out[slot_name(p, v)] = path->generic_string();
    }
  }
  return out;
}

}  // namespace

std::string slot_name(Phase p, View v) { return fmt::format("{}_{}", to_string(v), to_string(p)); }

std::filesystem::path CaseManifest::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

CaseManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(fmt::format("invalid JSON: {}", e.what()));
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    bad("manifest must be an object with a 'cases' array");
  }

  CaseManifest m;
  m.base_dir = base_dir;
  const std::string layout = doc.value("label_layout", std::string("challenge"));
  if (layout == "challenge") {
    m.label_layout = nifti::LabelLayout::Challenge;
  } else if (layout == "internal") {
    m.label_layout = nifti::LabelLayout::Internal;
  } else {
    bad(fmt::format("unknown label_layout '{}'", layout));
  }

  std::set<std::string> seen;
  for (const auto& c : doc["cases"]) {
    if (!c.is_object()) bad("each case must be an object");
    CaseEntry e;
    if (!c.contains("case_id") || !c["case_id"].is_string()) bad("case without a string 'case_id'");
    e.case_id = c["case_id"].get<std::string>();
    if (e.case_id.empty()) bad("empty case_id");
    if (!seen.insert(e.case_id).second) bad(fmt::format("duplicate case_id '{}'", e.case_id));

    const std::string path_name = c.value("pathology", std::string("Normal"));
    const auto pathology = parse_pathology(path_name);
    if (!pathology) bad(fmt::format("case '{}': unknown pathology '{}'", e.case_id, path_name));
    e.pathology = *pathology;

    if (!c.contains("labels")) bad(fmt::format("case '{}' has no 'labels'", e.case_id));
    e.labels = parse_slots(c["labels"], e.case_id, "labels");
    if (c.contains("images")) e.images = parse_slots(c["images"], e.case_id, "images");
    if (c.contains("predictions")) e.predictions = parse_slots(c["predictions"], e.case_id, "predictions");
    m.cases.push_back(std::move(e));
  }
  return m;
}

CaseManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open manifest '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_json(const CaseManifest& m) {
  json doc;
  doc["format"] = "rvseg-manifest";
  doc["version"] = 1;
  doc["label_layout"] = m.label_layout == nifti::LabelLayout::Challenge ? "challenge" : "internal";
  doc["cases"] = json::array();
  for (const auto& c : m.cases) {
    json e;
    e["case_id"] = c.case_id;
    e["pathology"] = std::string(to_string(c.pathology));
    e["images"] = slots_to_json(c.images);
    e["labels"] = slots_to_json(c.labels);
    e["predictions"] = slots_to_json(c.predictions);
    doc["cases"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

}  // namespace rvseg
