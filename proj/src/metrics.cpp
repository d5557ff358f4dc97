#include "rvseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {
namespace {

void check_same_dims(const LabelVolume& a, const LabelVolume& b) {
  if (!(a.dims() == b.dims())) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("volumes differ in dims: {}x{}x{} vs {}x{}x{}", a.dims().nx, a.dims().ny, a.dims().nz,
                            b.dims().nx, b.dims().ny, b.dims().nz));
  }
}

// Largest nearest-boundary squared distance from points in `from` to `to`.
// Inner loop stops as soon as the running minimum cannot raise the maximum.
double directed_max_min_sq(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  double cmax = 0.0;
  for (const Vec3& p : from) {
    double cmin = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) {
      const double d = (p - q).squaredNorm();
      if (d < cmin) {
        cmin = d;
        if (cmin <= cmax) break;
      }
    }
    cmax = std::max(cmax, cmin);
  }
  return cmax;
}

void directed_min_distances(const std::vector<Vec3>& from, const std::vector<Vec3>& to, std::vector<double>& out) {
  for (const Vec3& p : from) {
    double cmin = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) cmin = std::min(cmin, (p - q).squaredNorm());
    out.push_back(std::sqrt(cmin));
  }
}

std::pair<std::vector<Vec3>, std::vector<Vec3>> boundary_pair(const LabelVolume& a, const LabelVolume& b,
                                                              Label label) {
  check_same_dims(a, b);
  auto pa = boundary_points_mm(a, label);
  auto pb = boundary_points_mm(b, label);
  if (pa.empty() || pb.empty()) {
    throw Error(ErrorCode::EmptyMask, fmt::format("label {} is empty in {}", int(label),
                                                  pa.empty() && pb.empty() ? "both volumes"
                                                  : pa.empty()             ? "the first volume"
                                                                           : "the second volume"));
  }
  return {std::move(pa), std::move(pb)};
}

double metric_value(const ViewAverages& avg, Metric m) {
  switch (m) {
    case Metric::DsSa: return avg.ds_sa;
    case Metric::HdSa: return avg.hd_sa.value_or(std::numeric_limits<double>::quiet_NaN());
    case Metric::DsLa: return avg.ds_la;
    case Metric::HdLa: return avg.hd_la.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> phase_metric(const CaseMetrics& c, Phase p, Metric m) {
  const View v = (m == Metric::DsSa || m == Metric::HdSa) ? View::SA : View::LA;
  const auto& e = c.get(p, v);
  if (!e) return std::nullopt;
  return is_dice(m) ? std::optional<double>(e->dice) : e->hd_mm;
}

GroupSummary summarize_rows(std::string key, const std::array<std::vector<double>, 4>& columns) {
  GroupSummary g;
  g.key = std::move(key);
  for (std::size_t m = 0; m < 4; ++m) {
    if (!columns[m].empty()) g.metrics[m] = summarize(columns[m]);
  }
  return g;
}

}  // namespace

std::string_view to_string(Pathology p) {
  switch (p) {
    case Pathology::Normal: return "Normal";
    case Pathology::DilatedLV: return "DilatedLV";
    case Pathology::HCM: return "HCM";
    case Pathology::CAM: return "CAM";
    case Pathology::TOF: return "TOF";
    case Pathology::IC: return "IC";
    case Pathology::DilatedRV: return "DilatedRV";
    case Pathology::TR: return "TR";
  }
  return "Normal";
}

std::string_view display_name(Pathology p) {
  switch (p) {
    case Pathology::DilatedLV: return "Dilated LV";
    case Pathology::DilatedRV: return "Dilated RV";
    default: return to_string(p);
  }
}

std::optional<Pathology> parse_pathology(std::string_view s) {
  for (Pathology p : kAllPathologies) {
    if (s == to_string(p) || s == display_name(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Phase p) { return p == Phase::ED ? "ED" : "ES"; }
std::string_view to_string(View v) { return v == View::SA ? "SA" : "LA"; }

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::DsSa: return "DS_SA";
    case Metric::HdSa: return "HD_SA";
    case Metric::DsLa: return "DS_LA";
    case Metric::HdLa: return "HD_LA";
  }
  return "";
}

bool is_dice(Metric m) { return m == Metric::DsSa || m == Metric::DsLa; }

double dice_score(const LabelVolume& a, const LabelVolume& b, Label label) {
  check_same_dims(a, b);
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const bool in_a = a[n] == label;
    const bool in_b = b[n] == label;
    na += in_a;
    nb += in_b;
    both += in_a && in_b;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::vector<Vec3> boundary_points_mm(const LabelVolume& v, Label label) {
  const Dims& d = v.dims();
  const bool planar = d.nz == 1;
  auto outside_or_other = [&](int i, int j, int k) { return !d.contains(i, j, k) || v.at(i, j, k) != label; };

  std::vector<Vec3> pts;
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        if (v.at(i, j, k) != label) continue;
        bool edge = outside_or_other(i - 1, j, k) || outside_or_other(i + 1, j, k) ||
                    outside_or_other(i, j - 1, k) || outside_or_other(i, j + 1, k);
        if (!planar) edge = edge || outside_or_other(i, j, k - 1) || outside_or_other(i, j, k + 1);
        if (edge) pts.push_back(voxel_to_world(VoxelCoord(i, j, k), v.grid()).vec());
      }
    }
  }
  return pts;
}

double hausdorff_mm(const LabelVolume& a, const LabelVolume& b, Label label) {
  const auto [pa, pb] = boundary_pair(a, b, label);
  return std::sqrt(std::max(directed_max_min_sq(pa, pb), directed_max_min_sq(pb, pa)));
}

double hausdorff_percentile_mm(const LabelVolume& a, const LabelVolume& b, Label label, double percentile) {
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw Error(ErrorCode::InvalidValue, fmt::format("percentile {} outside [0, 100]", percentile));
  }
  const auto [pa, pb] = boundary_pair(a, b, label);
  std::vector<double> dist;
  dist.reserve(pa.size() + pb.size());
  directed_min_distances(pa, pb, dist);
  directed_min_distances(pb, pa, dist);
  std::sort(dist.begin(), dist.end());
  const auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(dist.size())));
  return dist[rank == 0 ? 0 : rank - 1];
}

bool CaseMetrics::complete() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.has_value(); });
}

ViewAverages phase_view_average(const CaseMetrics& c) {
  for (Phase p : {Phase::ED, Phase::ES}) {
    for (View v : {View::SA, View::LA}) {
      if (!c.get(p, v)) {
        throw Error(ErrorCode::MissingPhase,
                    fmt::format("case '{}' has no {} {} metrics", c.case_id, to_string(p), to_string(v)));
      }
    }
  }
  auto avg_hd = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return (*a + *b) / 2.0;
  };
  ViewAverages out;
  const auto& ed_sa = *c.get(Phase::ED, View::SA);
  const auto& es_sa = *c.get(Phase::ES, View::SA);
  const auto& ed_la = *c.get(Phase::ED, View::LA);
  const auto& es_la = *c.get(Phase::ES, View::LA);
  out.ds_sa = (ed_sa.dice + es_sa.dice) / 2.0;
  out.hd_sa = avg_hd(ed_sa.hd_mm, es_sa.hd_mm);
  out.ds_la = (ed_la.dice + es_la.dice) / 2.0;
  out.hd_la = avg_hd(ed_la.hd_mm, es_la.hd_mm);
  return out;
}

double challenge_score(double ds_sa, double hd_sa, double ds_la, double hd_la) {
  return (0.75 * (ds_sa + hd_sa) + 0.25 * (ds_la + hd_la)) / 2.0;
}

std::optional<double> challenge_score(const ViewAverages& avg) {
  if (!avg.hd_sa || !avg.hd_la) return std::nullopt;
  return challenge_score(avg.ds_sa, *avg.hd_sa, avg.ds_la, *avg.hd_la);
}

Stat summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to summarize");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd, values.size()};
}

std::vector<GroupSummary> aggregate_group(std::span<const CaseMetrics> cases, GroupKey key) {
  if (cases.empty()) throw Error(ErrorCode::EmptyInput, "no cases to aggregate");

  std::vector<GroupSummary> out;
  if (key == GroupKey::Pathology) {
    std::vector<ViewAverages> avgs;
    avgs.reserve(cases.size());
    for (const auto& c : cases) avgs.push_back(phase_view_average(c));

    for (Pathology p : kAllPathologies) {
      std::array<std::vector<double>, 4> cols;
      bool any = false;
      for (std::size_t n = 0; n < cases.size(); ++n) {
        if (cases[n].pathology != p) continue;
        any = true;
        for (Metric m : kAllMetrics) {
          const double v = metric_value(avgs[n], m);
          if (!std::isnan(v)) cols[static_cast<std::size_t>(m)].push_back(v);
        }
      }
      if (any) out.push_back(summarize_rows(std::string(display_name(p)), cols));
    }
    return out;
  }

  for (const auto& c : cases) {
    if (!c.complete()) phase_view_average(c);  // throws MissingPhase with context
  }
  std::array<std::vector<double>, 4> pooled;
  for (Phase p : {Phase::ED, Phase::ES}) {
    std::array<std::vector<double>, 4> cols;
    for (const auto& c : cases) {
      for (Metric m : kAllMetrics) {
        if (auto v = phase_metric(c, p, m)) {
          cols[static_cast<std::size_t>(m)].push_back(*v);
          pooled[static_cast<std::size_t>(m)].push_back(*v);
        }
      }
    }
    out.push_back(summarize_rows(std::string(to_string(p)), cols));
  }
  out.push_back(summarize_rows("Average", pooled));
  return out;
}

std::string format_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return fmt::format("{:.{}f}", v, std::max(0, digits - 1));
  auto decimals_for = [&](double x) { return std::max(0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(x))))); };
  int dec = decimals_for(v);
  // Rounding may carry into a new leading digit (9.996 -> 10.0).
  const double scale = std::pow(10.0, dec);
  const double rounded = std::round(v * scale) / scale;
  if (rounded != 0.0) dec = decimals_for(rounded);
  return fmt::format("{:.{}f}", v, dec);
}

std::string format_cell(const Stat& s, Metric m) {
  if (is_dice(m)) return fmt::format("{:.3f} ± {:.3f}", s.mean, s.std);
  return format_significant(s.mean, 3) + " ± " + format_significant(s.std, 3);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("paired samples differ in length: {} vs {}", x.size(), y.size()));
  }
  std::vector<double> diffs;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double d = x[n] - y[n];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty() && !x.empty()) return {0.0, 1.0, 0, true};
  const std::size_t n = diffs.size();
  if (n < kWilcoxonMinPairs) {
    throw Error(ErrorCode::TooFewPairs, fmt::format("{} non-zero differences, need >= {}", n, kWilcoxonMinPairs));
  }

  // Doubled mid-ranks are integers.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && std::abs(diffs[order[hi + 1]]) == std::abs(diffs[order[lo]])) ++hi;
    const auto r2 = static_cast<std::int64_t>(lo + 1 + hi + 1);  // 2 * mean of ranks lo+1..hi+1
    for (std::size_t t = lo; t <= hi; ++t) rank2[order[t]] = r2;
    const double tsize = static_cast<double>(hi - lo + 1);
    tie_term += tsize * tsize * tsize - tsize;
    lo = hi + 1;
  }

  std::int64_t w_plus2 = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (diffs[t] > 0.0) w_plus2 += rank2[t];
  }
  const auto total2 = static_cast<std::int64_t>(n * (n + 1));
  WilcoxonResult r;
  r.n_used = n;
  r.statistic = static_cast<double>(std::min(w_plus2, total2 - w_plus2)) / 2.0;

  if (n <= kWilcoxonExactMaxN) {
    // Null distribution of the doubled W+ by dynamic programming over signs.
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
    counts[0] = 1;
    std::int64_t reach = 0;
    for (std::size_t t = 0; t < n; ++t) {
      for (std::int64_t s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0) counts[static_cast<std::size_t>(s + rank2[t])] += counts[static_cast<std::size_t>(s)];
      }
      reach += rank2[t];
    }
    // |2 W+ - total| compared in doubled units: |s - total2/2| >= |w - total2/2|.
    const std::int64_t obs_dev = std::abs(2 * w_plus2 - total2);
    std::uint64_t extreme = 0;
    for (std::int64_t s = 0; s <= total2; ++s) {
      if (std::abs(2 * s - total2) >= obs_dev) extreme += counts[static_cast<std::size_t>(s)];
    }
    r.exact = true;
    r.p_value = std::min(1.0, static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n)));
    return r;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  r.exact = false;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double w_plus = static_cast<double>(w_plus2) / 2.0;
  const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace rvseg
