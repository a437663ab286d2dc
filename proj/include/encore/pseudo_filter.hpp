#pragma once

#include <string>
#include <vector>

#include "encore/grid.hpp"

namespace encore {

// Thresholds live in a fixed clamp band so they can neither collapse to
// keep-everything nor drift past 1 into keep-nothing-forever.
inline constexpr double kThresholdFloor = 0.05;
inline constexpr double kThresholdCeil = 0.999;

double clamp_threshold(double v);

struct ThresholdVector {
  std::vector<double> tau;  // length C, each within the clamp band
  std::string provenance;   // "fixed", "cac", "controller1..3"

  static ThresholdVector uniform(std::size_t class_count, double value,
                                 std::string provenance);
  void validate() const;
};

// Pseudo-labels with keep-mask: labels = channel argmax, a pixel is kept when
// its max probability reaches the threshold of its predicted class (>=).
LabelMask filter(const Grid& probs, const ThresholdVector& tau);

struct KeepFractions {
  std::vector<double> per_class;  // kept / labeled-as-class (0 if no pixels)
  double overall = 0.0;
};

KeepFractions keep_fraction(const LabelMask& mask, std::size_t class_count);

}  // namespace encore
