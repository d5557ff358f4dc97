#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "rvseg/cli.hpp"
#include "rvseg/error.hpp"
#include "rvseg/manifest.hpp"
#include "rvseg/metrics.hpp"

namespace rvseg::cli {
namespace {

using detail::json;

constexpr Phase kPhases[] = {Phase::ED, Phase::ES};
constexpr View kViews[] = {View::SA, View::LA};

enum class CaseStatus { Complete, Incomplete, Failed };

std::string_view to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::Complete: return "complete";
    case CaseStatus::Incomplete: return "incomplete";
    case CaseStatus::Failed: return "failed";
  }
  return "failed";
}

struct CaseOutcome {
  CaseMetrics metrics;
  CaseStatus status = CaseStatus::Failed;
  std::vector<std::string> notes;
  std::optional<ViewAverages> averages;
  std::optional<double> score;
};

unsigned worker_count(const EvalOptions& o, std::size_t n_cases) {
  unsigned n = o.workers.value_or(0);
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv(kWorkersEnv)) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) {
        n = std::min(n, static_cast<unsigned>(v));
      } else {
        spdlog::warn("ignoring {}='{}' (expected a positive integer)", kWorkersEnv, env);
      }
    }
  }
  return static_cast<unsigned>(std::clamp<std::size_t>(n, 1, std::max<std::size_t>(1, n_cases)));
}

// Removes RV predicted on SA slices that the same-phase LA prediction marks
// as RV-free. Returns the prediction unchanged (with a note) if no ROI can be
// derived.
LabelVolume post_mask_sa(const LabelVolume& sa_pred, const CaseEntry& entry, Phase phase, const CaseManifest& manifest,
                         const EvalOptions& o, std::vector<std::string>& notes) {
  const auto& la_path = entry.predictions.get(phase, View::LA);
  if (!la_path) {
    notes.push_back(fmt::format("post-mask skipped for {}: no LA prediction", to_string(phase)));
    return sa_pred;
  }
  try {
    auto [la_header, la] = nifti::read_labels(manifest.resolve(*la_path), manifest.label_layout);
    const TransitionParams params = detail::transition_params(la_header, o.slab_mm, o.margin_mm, o.rv_threshold);
    const RoiSpec roi = derive_roi(transform_label(la, sa_pred.grid(), params), params);
    return mask_non_rv(sa_pred, roi);
  } catch (const Error& e) {
    notes.push_back(fmt::format("post-mask skipped for {}: {}", to_string(phase), e.what()));
    return sa_pred;
  }
}

CaseOutcome evaluate_case(const CaseEntry& entry, const CaseManifest& manifest, const EvalOptions& o) {
  CaseOutcome out;
  out.metrics.case_id = entry.case_id;
  out.metrics.pathology = entry.pathology;
  try {
    for (Phase p : kPhases) {
      for (View v : kViews) {
        const std::string slot = slot_name(p, v);
        const auto& gt_path = entry.labels.get(p, v);
        const auto& pred_path = entry.predictions.get(p, v);
        if (!gt_path || !pred_path) {
          out.notes.push_back(fmt::format("{}: missing {}", slot, gt_path ? "prediction" : "label"));
          continue;
        }
        const LabelVolume gt = nifti::read_labels(manifest.resolve(*gt_path), manifest.label_layout).second;
        LabelVolume pred = nifti::read_labels(manifest.resolve(*pred_path), manifest.label_layout).second;
        if (gt.dims() != pred.dims()) {
          throw Error(ErrorCode::ShapeMismatch, fmt::format("{}: label {}x{}x{} vs prediction {}x{}x{}", slot,
                                                            gt.dims().nx, gt.dims().ny, gt.dims().nz, pred.dims().nx,
                                                            pred.dims().ny, pred.dims().nz));
        }
        if (!gt.grid().same_geometry(pred.grid(), 1e-3)) {
          out.notes.push_back(fmt::format("{}: label and prediction affines differ; compared by index", slot));
        }
        if (o.post_mask && v == View::SA) pred = post_mask_sa(pred, entry, p, manifest, o, out.notes);

        PhaseViewMetrics m;
        m.dice = dice_score(gt, pred, kRv);
        if (count_label(gt, kRv) > 0 && count_label(pred, kRv) > 0) {
          m.hd_mm = hausdorff_mm(gt, pred, kRv);
        } else {
          out.notes.push_back(fmt::format("{}: HD undefined (empty RV mask)", slot));
          spdlog::warn("case {}: {} HD undefined (empty RV mask)", entry.case_id, slot);
        }
        out.metrics.set(p, v, m);
      }
    }
  } catch (const Error& e) {
    out.status = CaseStatus::Failed;
    out.notes.push_back(e.what());
    spdlog::error("case {} failed: {}", entry.case_id, e.what());
    return out;
  }

  if (out.metrics.complete()) {
    out.status = CaseStatus::Complete;
    out.averages = phase_view_average(out.metrics);
    out.score = challenge_score(*out.averages);
  } else {
    out.status = CaseStatus::Incomplete;
    spdlog::warn("case {} incomplete", entry.case_id);
  }
  return out;
}

json stat_json(const Stat& s, const std::string& cell) {
  json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["count"] = s.count;
  j["cell"] = cell;
  return j;
}

json groups_json(const std::vector<GroupSummary>& groups) {
  json arr = json::array();
  for (const auto& g : groups) {
    json row;
    row["group"] = g.key;
    for (Metric m : kAllMetrics) {
      const auto& s = g.get(m);
      row[std::string(to_string(m))] = s ? stat_json(*s, format_cell(*s, m)) : json(nullptr);
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

std::optional<double> phase_value(const CaseMetrics& c, Phase p, Metric m) {
  const View v = (m == Metric::DsSa || m == Metric::HdSa) ? View::SA : View::LA;
  const auto& e = c.get(p, v);
  if (!e) return std::nullopt;
  if (is_dice(m)) return e->dice;
  return e->hd_mm;
}

json phase_tests_json(const std::vector<CaseMetrics>& complete) {
  json arr = json::array();
  for (Metric m : kAllMetrics) {
    std::vector<double> ed, es;
    for (const auto& c : complete) {
      const auto a = phase_value(c, Phase::ED, m);
      const auto b = phase_value(c, Phase::ES, m);
      if (a && b) {
        ed.push_back(*a);
        es.push_back(*b);
      }
    }
    json t;
    t["metric"] = std::string(to_string(m));
    t["test"] = "wilcoxon_signed_rank_ED_vs_ES";
    try {
      const WilcoxonResult r = wilcoxon_signed_rank(ed, es);
      t["n_used"] = r.n_used;
      t["statistic"] = r.statistic;
      t["p_value"] = r.p_value;
      t["exact"] = r.exact;
    } catch (const Error& e) {
      t["n_pairs"] = ed.size();
      t["error"] = e.what();
    }
    arr.push_back(std::move(t));
  }
  return arr;
}

json case_json(const CaseOutcome& c) {
  json j;
  j["case_id"] = c.metrics.case_id;
  j["pathology"] = std::string(to_string(c.metrics.pathology));
  j["status"] = std::string(to_string(c.status));
  json slots = json::object();
  for (View v : kViews) {
    for (Phase p : kPhases) {
      const auto& e = c.metrics.get(p, v);
      if (!e) {
        slots[slot_name(p, v)] = nullptr;
        continue;
      }
      slots[slot_name(p, v)] = {{"dice", e->dice}, {"hd_mm", e->hd_mm ? json(*e->hd_mm) : json(nullptr)}};
    }
  }
  j["metrics"] = std::move(slots);
  if (c.averages) {
    const auto& a = *c.averages;
    j["averages"] = {{"DS_SA", a.ds_sa},
                     {"HD_SA", a.hd_sa ? json(*a.hd_sa) : json(nullptr)},
                     {"DS_LA", a.ds_la},
                     {"HD_LA", a.hd_la ? json(*a.hd_la) : json(nullptr)}};
  } else {
    j["averages"] = nullptr;
  }
  j["score"] = c.score ? json(*c.score) : json(nullptr);
  j["notes"] = c.notes;
  return j;
}

std::string csv_number(double v) { return fmt::format("{:.6f}", v); }

}  // namespace

void cmd_eval(const EvalOptions& o) {
  const CaseManifest manifest = load_manifest(o.manifest);
  {
    TransitionParams check;
    check.margin_mm = o.margin_mm;
    check.slice_rv_threshold_vox = o.rv_threshold;
    if (o.slab_mm) check.slab_halfwidth_mm = 0.5 * *o.slab_mm;
    check.validate();
  }

  const std::size_t n = manifest.cases.size();
  std::vector<CaseOutcome> outcomes(n);
  const unsigned workers = worker_count(o, n);
  spdlog::info("eval: {} case(s), {} worker(s)", n, workers);

  // Results land in per-index slots, so the report order never depends on
  // thread scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr internal_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = evaluate_case(manifest.cases[i], manifest, o);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!internal_error) internal_error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (internal_error) std::rethrow_exception(internal_error);

  std::string csv = "case_id,pathology,phase,view,dice,hd_mm\n";
  for (const auto& c : outcomes) {
    for (Phase p : kPhases) {
      for (View v : kViews) {
        const auto& e = c.metrics.get(p, v);
        if (!e) continue;
        csv += fmt::format("{},{},{},{},{},{}\n", c.metrics.case_id, to_string(c.metrics.pathology), to_string(p),
                           to_string(v), csv_number(e->dice), e->hd_mm ? csv_number(*e->hd_mm) : std::string());
      }
    }
  }

  std::vector<CaseMetrics> complete;
  std::vector<double> scores;
  json excluded = json::array();
  for (const auto& c : outcomes) {
    if (c.status == CaseStatus::Complete) {
      complete.push_back(c.metrics);
      if (c.score) scores.push_back(*c.score);
    } else {
      excluded.push_back({{"case_id", c.metrics.case_id}, {"status", std::string(to_string(c.status))}});
    }
  }

  json report;
  report["tool"] = "rvseg";
  report["version"] = std::string(toolkit_version());
  report["parameters"] = {{"manifest", o.manifest.generic_string()},
                          {"label_layout", std::string(detail::layout_name(manifest.label_layout))},
                          {"label_evaluated", "RV"},
                          {"post_mask", o.post_mask},
                          {"margin_mm", o.margin_mm},
                          {"slab_mm", o.slab_mm ? json(*o.slab_mm) : json("LA slice thickness")},
                          {"rv_threshold_vox", o.rv_threshold},
                          {"hd_definition", "symmetric Hausdorff over boundary voxel centres, mm"},
                          {"score_weights", {{"SA", 0.75}, {"LA", 0.25}}}};
  json cases = json::array();
  for (const auto& c : outcomes) cases.push_back(case_json(c));
  report["cases"] = std::move(cases);
  if (complete.empty()) {
    report["by_pathology"] = json::array();
    report["by_phase"] = json::array();
  } else {
    report["by_pathology"] = groups_json(aggregate_group(complete, GroupKey::Pathology));
    report["by_phase"] = groups_json(aggregate_group(complete, GroupKey::Phase));
  }
  if (scores.empty()) {
    report["score"] = nullptr;
  } else {
    const Stat s = summarize(scores);
    report["score"] = stat_json(s, fmt::format("{:.4f} ± {:.4f}", s.mean, s.std));
  }
  report["phase_tests"] = phase_tests_json(complete);
  report["excluded_cases"] = std::move(excluded);

  detail::write_text(o.out_csv, csv);
  detail::write_text(o.out_json, report.dump(2) + "\n");
  spdlog::info("eval: {} complete, {} excluded", complete.size(), n - complete.size());
}

}  // namespace rvseg::cli
