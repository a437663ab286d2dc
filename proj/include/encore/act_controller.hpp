#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "encore/calibration.hpp"
#include "encore/pseudo_filter.hpp"

namespace encore {

// Adaptive confidence thresholding. Three class-wise threshold controllers
// bracket a center vector; every iteration the trainer reports which one the
// assessor Dice comparison picked, and a run of boundary picks shifts the
// whole triple toward that boundary.
//
// State machine, per transition with selection s and patience n:
//   - consecutive counter: +1 when s repeats the previous selection, else 1.
//   - s == 1 and counter >= n: triple <- (a1*t1, t1, a2*t1), counter <- 0.
//   - s == 3 and counter >= n: triple <- (a1*t3, t3, a2*t3), counter <- 0.
//   - s == 2 never adapts.
// All products clamp to [kThresholdFloor, kThresholdCeil]. After a shift the
// winning vector sits at the center, so the active selection becomes 2.
struct AdaptationEvent {
  std::size_t iteration = 0;
  int direction = 0;  // -1 down, +1 up
};

struct ControllerState {
  std::array<ThresholdVector, 3> taus;
  double alpha1 = 0.98;
  double alpha2 = 1.02;
  int patience = 5;
  int consecutive = 0;
  int last_selected = 0;  // 0 = none yet, else 1..3
  std::vector<AdaptationEvent> adaptations;

  std::size_t class_count() const { return taus[0].tau.size(); }
};

// (t1, t2, t3) = (a1*R, R, a2*R), clamped. Requires a fully resolved
// reliability vector and 0 < a1 < 1 < a2, n >= 1.
ControllerState init_controllers(const ReliabilityVector& reliability,
                                 double alpha1, double alpha2, int patience);

// Index of the best Dice in {1,2,3}. Exact ties involving the center pick the
// center; a tie between the two boundaries alone picks the lower index.
int select_controller(const std::array<double, 3>& dice_scores);

// Applies one selection; returns true when an adaptation fired.
bool record_and_adapt(ControllerState& state, int selected,
                      std::size_t iteration);

// Threshold carried into the next student cycle: the vector at the last
// selection, or the center before any selection happened.
const ThresholdVector& active_threshold(const ControllerState& state);

nlohmann::json controller_snapshot(const ControllerState& state,
                                   std::size_t iteration, int selected,
                                   bool adapted);

}  // namespace encore
