#pragma once

// Reference segmentation losses with analytic gradients: voxel-mean cross
// entropy and foreground-averaged soft Dice. Sized for verification on small
// fields, not for training.

#include <span>
#include <vector>

#include "rvseg/geom.hpp"
#include "rvseg/volume.hpp"

namespace rvseg {

inline constexpr double kProbClamp = 1e-12;
inline constexpr double kDefaultDiceSmooth = 1e-5;
inline constexpr double kDefaultDiceWeight = 1.0;

/// Per-voxel class probabilities, voxel-major: values[v * classes + c].
class ProbField {
 public:
  /// Throws InvalidValue unless every vector is non-negative and sums to 1 (1e-6).
  ProbField(Dims dims, int classes, std::vector<double> values);

  /// One-hot field from hard labels.
  static ProbField one_hot(const LabelVolume& labels, int classes);

  const Dims& dims() const { return dims_; }
  int classes() const { return classes_; }
  std::span<const double> values() const { return values_; }
  double at(std::size_t voxel, int c) const { return values_[voxel * static_cast<std::size_t>(classes_) + c]; }

 private:
  Dims dims_;
  int classes_;
  std::vector<double> values_;
};

struct LossResult {
  double value = 0.0;
  /// d value / d probs, same layout as the probabilities.
  std::vector<double> gradient;
};

// The span overloads skip the simplex check so finite-difference probes can
// perturb single entries; truth holds one label per voxel.
LossResult cross_entropy(std::span<const double> probs, int classes, std::span<const Label> truth);
LossResult soft_dice_loss(std::span<const double> probs, int classes, std::span<const Label> truth,
                          double smooth = kDefaultDiceSmooth);

LossResult cross_entropy(const ProbField& p, const LabelVolume& y);
LossResult soft_dice_loss(const ProbField& p, const LabelVolume& y, double smooth = kDefaultDiceSmooth);

/// CE + lambda * Dice, the form shared by the SA and LA objectives.
double composite_seg_loss(const ProbField& p, const LabelVolume& y, double lambda = kDefaultDiceWeight,
                          double smooth = kDefaultDiceSmooth);

}  // namespace rvseg
