#include "rvseg/losses.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rvseg/error.hpp"

namespace rvseg {
namespace {

std::size_t check_shapes(std::span<const double> probs, int classes, std::span<const Label> truth) {
  if (classes < 2) throw Error(ErrorCode::InvalidValue, fmt::format("need >= 2 classes, got {}", classes));
  if (probs.size() != truth.size() * static_cast<std::size_t>(classes)) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} probabilities for {} voxels x {} classes", probs.size(),
                                                      truth.size(), classes));
  }
  const auto bad = std::find_if(truth.begin(), truth.end(), [&](Label l) { return l >= classes; });
  if (bad != truth.end()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("label {} not covered by {} classes", int(*bad), classes));
  }
  return truth.size();
}

void check_dims(const ProbField& p, const LabelVolume& y) {
  if (!(p.dims() == y.dims())) throw Error(ErrorCode::ShapeMismatch, "probability field and labels differ in dims");
}

}  // namespace

ProbField::ProbField(Dims dims, int classes, std::vector<double> values)
    : dims_(dims), classes_(classes), values_(std::move(values)) {
  if (classes_ < 2) throw Error(ErrorCode::InvalidValue, fmt::format("need >= 2 classes, got {}", classes_));
  const std::size_t k = static_cast<std::size_t>(classes_);
  if (values_.size() != dims_.count() * k) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("{} values for {} voxels x {} classes", values_.size(), dims_.count(), classes_));
  }
  for (std::size_t v = 0; v < dims_.count(); ++v) {
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double x = values_[v * k + c];
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::InvalidValue, fmt::format("probability {} at voxel {} class {}", x, v, c));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::InvalidValue, fmt::format("probabilities at voxel {} sum to {}", v, sum));
    }
  }
}

ProbField ProbField::one_hot(const LabelVolume& labels, int classes) {
  const std::size_t k = static_cast<std::size_t>(classes);
  std::vector<double> values(labels.size() * k, 0.0);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] >= classes) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("label {} not covered by {} classes", int(labels[v]), classes));
    }
    values[v * k + labels[v]] = 1.0;
  }
  return ProbField(labels.dims(), classes, std::move(values));
}

LossResult cross_entropy(std::span<const double> probs, int classes, std::span<const Label> truth) {
  const std::size_t n = check_shapes(probs, classes, truth);
  const std::size_t k = static_cast<std::size_t>(classes);
  LossResult r;
  r.gradient.assign(probs.size(), 0.0);
  if (n == 0) return r;

  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t idx = v * k + truth[v];
    const double p = probs[idx];
    const double pc = std::clamp(p, kProbClamp, 1.0);
    sum -= std::log(pc);
    // Zero derivative where the clamp is active.
    if (p > kProbClamp && p <= 1.0) r.gradient[idx] = -inv_n / p;
  }
  r.value = sum * inv_n;
  return r;
}

LossResult soft_dice_loss(std::span<const double> probs, int classes, std::span<const Label> truth, double smooth) {
  const std::size_t n = check_shapes(probs, classes, truth);
  if (!(smooth >= 0.0)) throw Error(ErrorCode::InvalidValue, fmt::format("smooth must be >= 0, got {}", smooth));
  const std::size_t k = static_cast<std::size_t>(classes);

  std::vector<double> inter(k, 0.0), psum(k, 0.0), ysum(k, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t c = 1; c < k; ++c) {
      const double p = probs[v * k + c];
      const double y = truth[v] == c ? 1.0 : 0.0;
      inter[c] += p * y;
      psum[c] += p;
      ysum[c] += y;
    }
  }

  const double w = 1.0 / static_cast<double>(k - 1);
  LossResult r;
  r.gradient.assign(probs.size(), 0.0);
  double term_sum = 0.0;
  for (std::size_t c = 1; c < k; ++c) {
    const double num = 2.0 * inter[c] + smooth;
    const double den = psum[c] + ysum[c] + smooth;
    if (den == 0.0) {
      // Class absent from both prediction and truth with no smoothing: perfect agreement.
      term_sum += 1.0;
      continue;
    }
    term_sum += num / den;
    // d(num/den)/dp_vc = (2 y_vc den - num) / den^2
    const double inv_den2 = 1.0 / (den * den);
    for (std::size_t v = 0; v < n; ++v) {
      const double y = truth[v] == c ? 1.0 : 0.0;
      r.gradient[v * k + c] = -w * (2.0 * y * den - num) * inv_den2;
    }
  }
  r.value = 1.0 - term_sum / static_cast<double>(k - 1);
  return r;
}

LossResult cross_entropy(const ProbField& p, const LabelVolume& y) {
  check_dims(p, y);
  return cross_entropy(p.values(), p.classes(), y.data());
}

LossResult soft_dice_loss(const ProbField& p, const LabelVolume& y, double smooth) {
  check_dims(p, y);
  return soft_dice_loss(p.values(), p.classes(), y.data(), smooth);
}

double composite_seg_loss(const ProbField& p, const LabelVolume& y, double lambda, double smooth) {
  return cross_entropy(p, y).value + lambda * soft_dice_loss(p, y, smooth).value;
}

}  // namespace rvseg
