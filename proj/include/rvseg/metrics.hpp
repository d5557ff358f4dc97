#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rvseg/geom.hpp"
#include "rvseg/volume.hpp"

namespace rvseg {

enum class Pathology { Normal, DilatedLV, HCM, CAM, TOF, IC, DilatedRV, TR };
inline constexpr std::array<Pathology, 8> kAllPathologies{Pathology::Normal, Pathology::DilatedLV, Pathology::HCM,
                                                          Pathology::CAM,    Pathology::TOF,       Pathology::IC,
                                                          Pathology::DilatedRV, Pathology::TR};

/// Identifier used in manifests and reports ("DilatedLV").
std::string_view to_string(Pathology p);
/// Table label ("Dilated LV").
std::string_view display_name(Pathology p);
/// Accepts either form, case-sensitive.
std::optional<Pathology> parse_pathology(std::string_view s);

enum class Phase { ED, ES };
enum class View { SA, LA };
std::string_view to_string(Phase p);
std::string_view to_string(View v);

/// 2|A n B| / (|A| + |B|) over voxels equal to `label`; 1.0 when both are empty.
double dice_score(const LabelVolume& a, const LabelVolume& b, Label label);

/// Physical centres of boundary voxels: labelled voxels with a 6-neighbour
/// (4-neighbour in-plane for single-slice volumes) that is unlabelled or
/// outside the grid.
std::vector<Vec3> boundary_points_mm(const LabelVolume& v, Label label);

/// Symmetric Hausdorff distance between boundary voxel centres, in mm.
/// Throws Error(EmptyMask) if either mask is empty.
double hausdorff_mm(const LabelVolume& a, const LabelVolume& b, Label label);

/// Percentile (0..100, nearest rank) of the pooled directed boundary
/// distances; 95 gives the usual HD95.
double hausdorff_percentile_mm(const LabelVolume& a, const LabelVolume& b, Label label, double percentile);

struct PhaseViewMetrics {
  double dice = 0.0;
  /// Missing when either mask is empty.
  std::optional<double> hd_mm;
};

struct CaseMetrics {
  std::string case_id;
  Pathology pathology = Pathology::Normal;
  std::array<std::optional<PhaseViewMetrics>, 4> entries{};

  const std::optional<PhaseViewMetrics>& get(Phase p, View v) const { return entries[slot(p, v)]; }
  void set(Phase p, View v, PhaseViewMetrics m) { entries[slot(p, v)] = m; }
  bool complete() const;

 private:
  static std::size_t slot(Phase p, View v) { return static_cast<std::size_t>(p) * 2 + static_cast<std::size_t>(v); }
};

/// ED/ES means per view. HD stays empty if either phase lacks it.
struct ViewAverages {
  double ds_sa = 0.0;
  std::optional<double> hd_sa;
  double ds_la = 0.0;
  std::optional<double> hd_la;
};

/// Throws Error(MissingPhase) unless all four phase/view entries are present.
ViewAverages phase_view_average(const CaseMetrics& c);

/// (0.75 (DS_SA + HD_SA) + 0.25 (DS_LA + HD_LA)) / 2, exactly as defined by
/// the challenge, mixed units included.
double challenge_score(double ds_sa, double hd_sa, double ds_la, double hd_la);
std::optional<double> challenge_score(const ViewAverages& avg);

enum class Metric { DsSa, HdSa, DsLa, HdLa };
inline constexpr std::array<Metric, 4> kAllMetrics{Metric::DsSa, Metric::HdSa, Metric::DsLa, Metric::HdLa};
std::string_view to_string(Metric m);
bool is_dice(Metric m);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1); 0 when n == 1
  std::size_t count = 0;
};

/// Sample mean/std; throws Error(EmptyInput) on an empty span.
Stat summarize(std::span<const double> values);

struct GroupSummary {
  std::string key;
  std::array<std::optional<Stat>, 4> metrics{};
  bool sample_std = true;

  const std::optional<Stat>& get(Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

enum class GroupKey { Pathology, Phase };

/// Per-pathology rows (phase-averaged values, in table order) or per-phase
/// rows followed by an "Average" row pooling both phases. Every case must be
/// complete (Error(MissingPhase) otherwise); Error(EmptyInput) on no cases.
std::vector<GroupSummary> aggregate_group(std::span<const CaseMetrics> cases, GroupKey key);

/// Rounds to `digits` significant figures, keeping trailing zeros ("5.70").
std::string format_significant(double v, int digits);
/// "0.916 ± 0.042" for Dice, "11.2 ± 5.53" for distances.
std::string format_cell(const Stat& s, Metric m);

struct WilcoxonResult {
  /// min(W+, W-) over the non-zero differences.
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_used = 0;
  bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactMaxN = 12;
inline constexpr std::size_t kWilcoxonMinPairs = 5;

/// Two-sided paired Wilcoxon signed-rank test. Zero differences are dropped,
/// tied magnitudes get mid-ranks. Exact null distribution for n <= 12,
/// normal approximation with continuity and tie correction above.
/// All-zero differences give p = 1; otherwise fewer than 5 non-zero pairs
/// throw Error(TooFewPairs).
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

}  // namespace rvseg
