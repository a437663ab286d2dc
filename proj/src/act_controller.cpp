#include "encore/act_controller.hpp"

#include <cmath>

#include "encore/errors.hpp"

namespace encore {

namespace {

ThresholdVector scaled(const ThresholdVector& base, double factor,
                       std::string provenance) {
  ThresholdVector out;
  out.tau.reserve(base.tau.size());
  for (const double v : base.tau) {
    out.tau.push_back(clamp_threshold(factor * v));
  }
  out.provenance = std::move(provenance);
  return out;
}

ThresholdVector renamed(const ThresholdVector& base, std::string provenance) {
  ThresholdVector out = base;
  out.provenance = std::move(provenance);
  return out;
}

}  // namespace

ControllerState init_controllers(const ReliabilityVector& reliability,
                                 double alpha1, double alpha2, int patience) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0 && alpha2 > 1.0)) {
    throw ValidationError(
        "threshold adaptors must satisfy 0 < alpha1 < 1 < alpha2");
  }
  if (patience < 1) {
    throw ValidationError("patience must be at least 1");
  }
  ThresholdVector center;
  center.provenance = "controller2";
  for (std::size_t c = 0; c < reliability.values.size(); ++c) {
    if (!reliability.values[c].has_value()) {
      throw ValidationError("controller init requires a resolved reliability "
                            "vector (class " +
                            std::to_string(c) + " undefined)");
    }
    center.tau.push_back(clamp_threshold(*reliability.values[c]));
  }
  if (center.tau.empty()) {
    throw ValidationError("controller init: empty reliability vector");
  }

  ControllerState state;
  state.alpha1 = alpha1;
  state.alpha2 = alpha2;
  state.patience = patience;
  state.taus[0] = scaled(center, alpha1, "controller1");
  state.taus[1] = center;
  state.taus[2] = scaled(center, alpha2, "controller3");
  return state;
}

int select_controller(const std::array<double, 3>& dice_scores) {
  for (const double d : dice_scores) {
    if (!std::isfinite(d)) {
      throw ValidationError("controller selection: non-finite Dice score");
    }
  }
  const double best =
      std::max(dice_scores[0], std::max(dice_scores[1], dice_scores[2]));
  // Center wins every tie it participates in: no drift signal on ties.
  if (dice_scores[1] == best) {
    return 2;
  }
  if (dice_scores[0] == best) {
    return 1;
  }
  return 3;
}

bool record_and_adapt(ControllerState& state, int selected,
                      std::size_t iteration) {
  if (selected < 1 || selected > 3) {
    throw ValidationError("selected controller index must be in {1,2,3}");
  }
  state.consecutive = selected == state.last_selected ? state.consecutive + 1
                                                      : 1;
  state.last_selected = selected;

  const bool run_complete = state.consecutive >= state.patience;
  if (selected == 2 || !run_complete) {
    return false;
  }

  const ThresholdVector winner = state.taus[selected - 1];
  state.taus[0] = scaled(winner, state.alpha1, "controller1");
  state.taus[1] = renamed(winner, "controller2");
  state.taus[2] = scaled(winner, state.alpha2, "controller3");
  state.consecutive = 0;
  // The winning vector now sits at the center slot.
  state.last_selected = 2;
  state.adaptations.push_back({iteration, selected == 1 ? -1 : +1});
  return true;
}

const ThresholdVector& active_threshold(const ControllerState& state) {
  if (state.last_selected == 0) {
    return state.taus[1];
  }
  return state.taus[static_cast<std::size_t>(state.last_selected - 1)];
}

nlohmann::json controller_snapshot(const ControllerState& state,
                                   std::size_t iteration, int selected,
                                   bool adapted) {
  return {{"iter", iteration},
          {"tau1", state.taus[0].tau},
          {"tau2", state.taus[1].tau},
          {"tau3", state.taus[2].tau},
          {"selected", selected},
          {"counter", state.consecutive},
          {"adapted", adapted}};
}

}  // namespace encore
