#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "encore/grid.hpp"
#include "encore/rng.hpp"

namespace encore {

// Fixed (non-learned) per-pixel features: raw channel value, local mean and
// local std over a (2r+1)^2 clamped window, plus two normalized coordinate
// channels.
struct FeatureExtractor {
  int radius = 2;

  std::size_t feature_count(std::size_t channels) const {
    return channels * 3 + 2;
  }
  Grid features(const Grid& image) const;  // (F,H,W)
};

// Per-pixel segmenter: linear map over the extracted features, optionally
// through one tanh hidden layer. Small enough that cloning it per assessor
// each iteration costs nothing.
struct SegModel {
  FeatureExtractor extractor;
  std::size_t class_count = 0;
  std::size_t feature_count = 0;
  std::size_t hidden_units = 0;  // 0 -> linear
  Grid w;   // (C,F) when linear
  Grid b;   // (C)
  Grid w1;  // (H,F) when hidden
  Grid w2;  // (C,H) when hidden
  std::uint64_t step = 0;

  static SegModel init(std::size_t classes, std::size_t image_channels,
                       std::size_t hidden, const FeatureExtractor& fx,
                       Rng& rng);
  SegModel clone() const { return *this; }
  bool same_architecture(const SegModel& other) const;
};

struct ParamGrads {
  Grid w;
  Grid b;
  Grid w1;
  Grid w2;
  bool all_finite() const;
};

struct LossReport {
  double loss = 0.0;
  ParamGrads grads;
  std::size_t contributing_pixels = 0;
};

Grid forward(const SegModel& model, const Grid& image);  // logits (C,H,W)
Grid forward_on_features(const SegModel& model, const Grid& feats);

// Mean negative log-likelihood over kept pixels, with analytic gradients.
// Zero kept pixels is not an error: loss 0, zero gradients.
LossReport masked_ce_loss(const SegModel& model, const Grid& image,
                          const LabelMask& target);
LossReport masked_ce_loss_on_features(const SegModel& model, const Grid& feats,
                                      const LabelMask& target);
// Mean over all kept pixels across a batch; reduction in index order.
LossReport masked_ce_loss_batch(const SegModel& model,
                                std::span<const Grid> feats,
                                std::span<const LabelMask> targets);

// theta <- theta - lr * grad; non-finite gradients raise TrainingError
// carrying the model's step counter.
void sgd_step(SegModel& model, const ParamGrads& grads, double lr);

// lr_init * (1 - iter/total_iter)^0.9
double poly_lr(double lr_init, std::size_t iter, std::size_t total_iter);

// teacher <- decay * teacher + (1 - decay) * student, elementwise.
void ema_update(SegModel& teacher, const SegModel& student, double decay);

void save_model(const std::filesystem::path& path, const SegModel& model);
SegModel load_model(const std::filesystem::path& path);

}  // namespace encore
