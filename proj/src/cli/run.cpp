#include <iostream>
#include <map>

#include <fmt/format.h>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "rvseg/cli.hpp"
#include "rvseg/error.hpp"

#ifndef RVSEG_VERSION
#define RVSEG_VERSION "0.0.0"
#endif

namespace rvseg::cli {
namespace {

void setup_logging(bool quiet, bool verbose) {
  auto logger = spdlog::get("rvseg");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("rvseg");
    logger->set_pattern("%n: %l: %v");
    spdlog::set_default_logger(logger);
  }
  logger->set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);
}

const std::map<std::string, nifti::LabelLayout> kLayouts{{"challenge", nifti::LabelLayout::Challenge},
                                                         {"internal", nifti::LabelLayout::Internal}};

}  // namespace

std::string_view toolkit_version() { return RVSEG_VERSION; }

int run(const std::vector<std::string>& args) {
  CLI::App app{"RV segmentation geometry and evaluation toolkit", "rvseg"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  TransformOptions t;
  std::string direction = "la2sa";
  auto* transform = app.add_subcommand("transform", "Resample a label volume onto another grid");
  transform->add_option("--src", t.src, "Source label NIfTI")->required();
  transform->add_option("--dst-grid", t.dst_grid, "NIfTI whose header defines the target grid")->required();
  transform->add_option("--out", t.out, "Output label NIfTI")->required();
  transform->add_option("--slab-mm", t.slab_mm, "Slab thickness for a single-slice source (default: its slice thickness)")
      ->check(CLI::PositiveNumber);
  transform->add_option("--direction", direction, "la2sa or sa2la")->check(CLI::IsMember({"la2sa", "sa2la"}));
  transform->add_option("--label-layout", t.layout, "challenge (RV=3) or internal (RV=2)")
      ->transform(CLI::CheckedTransformer(kLayouts));

  RoiOptions r;
  auto* roi = app.add_subcommand("roi", "Derive the SA region of interest from an LA label");
  roi->add_option("--la-label", r.la_label, "LA label NIfTI")->required();
  roi->add_option("--sa-image", r.sa_image, "SA image NIfTI")->required();
  roi->add_option("--out-json", r.out_json, "ROI JSON output")->required();
  roi->add_option("--crop-out", r.crop_out, "Optional cropped SA image");
  roi->add_option("--margin-mm", r.margin_mm, "Dilation margin")->check(CLI::NonNegativeNumber);
  roi->add_option("--slab-mm", r.slab_mm, "LA slab thickness (default: LA slice thickness)")->check(CLI::PositiveNumber);
  roi->add_option("--rv-threshold", r.rv_threshold, "Minimum transformed RV voxels per slice")->check(CLI::PositiveNumber);
  roi->add_option("--label-layout", r.layout, "challenge or internal")->transform(CLI::CheckedTransformer(kLayouts));

  EvalOptions e;
  auto* eval = app.add_subcommand("eval", "Evaluate predictions listed in a manifest");
  eval->add_option("--manifest", e.manifest, "Case manifest JSON")->required();
  eval->add_option("--out-csv", e.out_csv, "Per-case CSV")->required();
  eval->add_option("--out-json", e.out_json, "Aggregate JSON report")->required();
  eval->add_flag("--post-mask", e.post_mask, "Drop SA RV outside slices the LA prediction marks as RV");
  eval->add_option("--margin-mm", e.margin_mm, "ROI margin for --post-mask")->check(CLI::NonNegativeNumber);
  eval->add_option("--slab-mm", e.slab_mm, "LA slab thickness for --post-mask")->check(CLI::PositiveNumber);
  eval->add_option("--rv-threshold", e.rv_threshold, "RV voxels per slice for --post-mask")->check(CLI::PositiveNumber);
  eval->add_option("--workers", e.workers, fmt::format("Worker threads (default: cores, capped by {})", kWorkersEnv))
      ->check(CLI::PositiveNumber);

  PhantomOptions p;
  std::string predictions = "copy";
  bool random = false;
  auto* phantom = app.add_subcommand("phantom", "Write synthetic two-ellipsoid cases and a manifest");
  phantom->add_option("--out-dir", p.out_dir, "Output directory")->required();
  auto* spec_opt = phantom->add_option("--spec-json", p.spec_json, "Fixed ED ellipsoid pair");
  auto* random_opt = phantom->add_flag("--random", random, "Random geometry per case (the default)");
  spec_opt->excludes(random_opt);
  phantom->add_option("--seed", p.seed, "Random seed");
  phantom->add_option("--n-cases", p.n_cases, "Number of cases")->check(CLI::PositiveNumber);
  phantom->add_option("--predictions", predictions, "copy, perturbed or none")
      ->check(CLI::IsMember({"copy", "perturbed", "none"}));

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "Print eval JSON as markdown tables");
  report->add_option("--in-json", rep.in_json, "Eval JSON report")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& s) {
    return app.exit(s);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe);
    return kExitInput;
  }

  setup_logging(quiet, verbose);
  try {
    if (*transform) {
      t.direction = direction == "sa2la" ? Direction::SaToLa : Direction::LaToSa;
      cmd_transform(t);
    } else if (*roi) {
      cmd_roi(r);
    } else if (*eval) {
      cmd_eval(e);
    } else if (*phantom) {
      p.predictions = predictions == "perturbed" ? PredictionMode::Perturbed
                      : predictions == "none"    ? PredictionMode::None
                                                 : PredictionMode::Copy;
      cmd_phantom(p);
    } else if (*report) {
      cmd_report(rep, std::cout);
    }
  } catch (const Error& err) {
    spdlog::error("{}", err.what());
    return is_geometry_error(err.code()) ? kExitGeometry : kExitInput;
  } catch (const std::exception& ex) {
    spdlog::critical("internal error: {}", ex.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace rvseg::cli
