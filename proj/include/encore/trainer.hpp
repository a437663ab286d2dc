#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "encore/act_controller.hpp"
#include "encore/calibration.hpp"
#include "encore/pseudo_filter.hpp"
#include "encore/segmodel.hpp"
#include "encore/synthdata.hpp"

namespace encore {

enum class TrainMode { supervised, fixed, cac_only, encore };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
  TrainMode mode = TrainMode::encore;
  std::size_t epochs = 12;
  std::size_t batch_labeled = 4;
  std::size_t batch_unlabeled = 8;
  double lr_init = 0.5;
  double lambda_u = 1.0;
  bool lambda_ramp = true;
  double ema_decay = 0.99;
  double fixed_threshold = 0.95;
  ReliabilityMode cac_mode = ReliabilityMode::tp_confidence;
  double alpha1 = 0.98;
  double alpha2 = 1.02;
  int patience = 5;
  std::uint64_t seed = 1;
  std::optional<double> label_fraction;  // overrides the manifest flags
  double warmup_fraction = 0.2;
  std::size_t hidden_units = 16;
  double reliability_fallback = 0.95;
  std::size_t eval_every = 0;  // 0 -> once per epoch

  std::vector<std::string> validate() const;  // one message per bad field
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);  // throws ConfigError
};

struct IterationRecord {
  std::size_t iteration = 0;
  bool warmup = false;
  double lr = 0.0;
  double loss_l = 0.0;
  std::optional<double> loss_u;
  std::optional<double> kept_fraction;
  std::optional<std::array<double, 3>> controller_dice;
  int selected = 0;  // 0 = not applicable
  bool adapted = false;
  std::vector<double> active_tau;
  std::optional<double> eval_dice;
};

// A materialized batch: augmented images with matching feature maps.
struct LabeledBatch {
  std::vector<Grid> features;
  std::vector<LabelMask> truths;
  std::vector<Sample> samples;  // augmented copies, for Dice evaluation
};

struct UnlabeledBatch {
  std::vector<Grid> weak_features;
  std::vector<Grid> strong_features;
};

// Test hooks: overriding the assessor Dice triple turns the feedback loop
// into a scripted harness.
struct EncoreHooks {
  std::function<std::array<double, 3>(const std::array<double, 3>&)>
      override_assessor_dice;
};

std::size_t steps_per_epoch(std::size_t train_size, const TrainConfig& cfg);

SegModel init_model(const TrainConfig& cfg, std::size_t class_count,
                    std::size_t image_channels);

// Supervised-only training for `warmup_iters` steps out of a `total_iters`
// schedule. Consumes only `labeled_rng`; with zero iterations the initial
// model comes back untouched.
SegModel warmup(const TrainConfig& cfg, std::span<const Sample> labeled,
                std::size_t warmup_iters, std::size_t total_iters,
                Rng& labeled_rng, std::vector<IterationRecord>* trace);

// Trains the three assessors (clones of the student) one step each under
// their controller thresholds and scores them on the labeled batch. The
// student is untouched by construction.
std::array<double, 3> assess_controllers(const SegModel& student,
                                         const ControllerState& controllers,
                                         std::span<const Grid> teacher_probs,
                                         const UnlabeledBatch& unlabeled,
                                         const LabeledBatch& labeled,
                                         double lr);

// One full semi-supervised iteration: teacher pseudo-labels, assessor
// selection, controller adaptation, combined student step, EMA teacher
// update.
IterationRecord encore_iteration(SegModel& student, SegModel& teacher,
                                 ControllerState& controllers,
                                 const LabeledBatch& labeled,
                                 const UnlabeledBatch& unlabeled,
                                 const TrainConfig& cfg, std::size_t iteration,
                                 double lr, double lambda_eff,
                                 const EncoreHooks* hooks = nullptr);

struct RunResult {
  double final_eval_dice = 0.0;
  std::size_t cac_calls = 0;
  std::size_t total_iterations = 0;
  std::filesystem::path run_dir;
};

// Full pipeline: split, init, warmup, (CAC), main loop per mode, final eval.
// Writes config.json, manifest.json, metrics.csv, eval.csv, final_model.json
// and, when applicable, reliability.json and controller_trace.jsonl.
RunResult run(const TrainConfig& cfg, const Dataset& dataset,
              const std::filesystem::path& out_dir);

}  // namespace encore
