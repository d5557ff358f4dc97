#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvseg/nifti.hpp"
#include "rvseg/transition.hpp"

namespace rvseg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitGeometry = 3,
  kExitInternal = 4,
};

/// Caps the number of eval worker threads.
inline constexpr const char* kWorkersEnv = "RVSEG_MAX_WORKERS";

std::string_view toolkit_version();

enum class Direction { LaToSa, SaToLa };

struct TransformOptions {
  std::filesystem::path src;
  std::filesystem::path dst_grid;
  std::filesystem::path out;
  /// Full slab thickness for single-slice sources; defaults to the source
  /// slice thickness from its header (5 mm half-width if unset).
  std::optional<double> slab_mm;
  Direction direction = Direction::LaToSa;
  nifti::LabelLayout layout = nifti::LabelLayout::Challenge;
};

struct RoiOptions {
  std::filesystem::path la_label;
  std::filesystem::path sa_image;
  std::filesystem::path out_json;
  std::optional<std::filesystem::path> crop_out;
  double margin_mm = 10.0;
  std::optional<double> slab_mm;
  int rv_threshold = 1;
  nifti::LabelLayout layout = nifti::LabelLayout::Challenge;
};

struct EvalOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_csv;
  std::filesystem::path out_json;
  /// Drop RV predicted on SA slices the LA prediction marks as non-RV.
  bool post_mask = false;
  double margin_mm = 10.0;
  std::optional<double> slab_mm;
  int rv_threshold = 1;
  std::optional<unsigned> workers;
};

enum class PredictionMode { Copy, Perturbed, None };

struct PhantomOptions {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> spec_json;
  std::uint64_t seed = 0;
  int n_cases = 1;
  PredictionMode predictions = PredictionMode::Copy;
};

struct ReportOptions {
  std::filesystem::path in_json;
};

// Each command throws rvseg::Error on failure; run() maps errors to exit codes.
void cmd_transform(const TransformOptions& opts);
RoiSpec cmd_roi(const RoiOptions& opts);
void cmd_eval(const EvalOptions& opts);
void cmd_phantom(const PhantomOptions& opts);
void cmd_report(const ReportOptions& opts, std::ostream& out);

/// Full command line including the program name.
int run(const std::vector<std::string>& args);

}  // namespace rvseg::cli
