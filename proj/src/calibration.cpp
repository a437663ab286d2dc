#include "encore/calibration.hpp"

#include <cmath>

#include "encore/errors.hpp"
#include "encore/log.hpp"

namespace encore {

std::string to_string(ReliabilityMode mode) {
  return mode == ReliabilityMode::recall ? "recall" : "tp_confidence";
}

ReliabilityMode reliability_mode_from_string(const std::string& s) {
  if (s == "recall") {
    return ReliabilityMode::recall;
  }
  if (s == "tp_confidence") {
    return ReliabilityMode::tp_confidence;
  }
  throw ValidationError("unknown reliability mode: " + s);
}

nlohmann::json ReliabilityVector::to_json() const {
  nlohmann::json vals = nlohmann::json::array();
  nlohmann::json undefined = nlohmann::json::array();
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c].has_value()) {
      vals.push_back(*values[c]);
    } else {
      vals.push_back(nullptr);
      undefined.push_back(c);
    }
  }
  return {{"mode", encore::to_string(mode)},
          {"values", vals},
          {"undefined_classes", undefined},
          {"source_samples", source_samples}};
}

ReliabilityVector compute_reliability(std::span<const Grid> probs,
                                      std::span<const LabelMask> truths,
                                      ReliabilityMode mode) {
  if (probs.empty() || probs.size() != truths.size()) {
    throw ValidationError(
        "compute_reliability: probs/truths lists must align and be non-empty");
  }
  const std::size_t class_count = probs[0].channels();

  // Sums in image index order, for bitwise-reproducible reductions.
  std::vector<double> contrib_sum(class_count, 0.0);
  std::vector<std::size_t> contrib_images(class_count, 0);

  for (std::size_t i = 0; i < probs.size(); ++i) {
    const Grid& pg = probs[i];
    const LabelMask& truth = truths[i];
    if (pg.channels() != class_count) {
      throw ValidationError("compute_reliability: class count varies");
    }
    if (pg.height() != truth.height || pg.width() != truth.width) {
      throw ShapeError("compute_reliability: probs/truth extent mismatch");
    }
    const std::size_t plane = truth.size();
    for (std::size_t px = 0; px < plane; ++px) {
      double sum = 0.0;
      for (std::size_t c = 0; c < class_count; ++c) {
        sum += pg.data[c * plane + px];
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ValidationError(
            "compute_reliability: probabilities not normalized (pixel sum " +
            std::to_string(sum) + ")");
      }
    }

    const LabelMask pred = argmax_channel(pg);
    for (std::size_t c = 0; c < class_count; ++c) {
      std::size_t truth_pixels = 0;
      std::size_t tp_pixels = 0;
      double tp_conf_sum = 0.0;
      for (std::size_t px = 0; px < plane; ++px) {
        if (truth.labels[px] != static_cast<int>(c)) {
          continue;
        }
        ++truth_pixels;
        if (pred.labels[px] == static_cast<int>(c)) {
          ++tp_pixels;
          tp_conf_sum += pg.data[c * plane + px];
        }
      }
      if (truth_pixels == 0) {
        continue;
      }
      ++contrib_images[c];
      if (mode == ReliabilityMode::recall) {
        contrib_sum[c] += static_cast<double>(tp_pixels) /
                          static_cast<double>(truth_pixels);
      } else {
        contrib_sum[c] +=
            tp_pixels == 0 ? 0.0
                           : tp_conf_sum / static_cast<double>(tp_pixels);
      }
    }
  }

  ReliabilityVector r;
  r.mode = mode;
  r.values.resize(class_count);
  r.source_samples = contrib_images;
  for (std::size_t c = 0; c < class_count; ++c) {
    if (contrib_images[c] > 0) {
      r.values[c] = contrib_sum[c] / static_cast<double>(contrib_images[c]);
    }
  }
  return r;
}

ReliabilityVector resolve_undefined(const ReliabilityVector& r,
                                    double fallback) {
  if (!(fallback > 0.0 && fallback < 1.0)) {
    throw ValidationError("reliability fallback must be in (0,1)");
  }
  double defined_sum = 0.0;
  std::size_t defined_count = 0;
  for (const auto& v : r.values) {
    if (v.has_value()) {
      defined_sum += *v;
      ++defined_count;
    }
  }
  if (defined_count == r.values.size()) {
    return r;
  }
  const double fill =
      defined_count > 0 ? defined_sum / static_cast<double>(defined_count)
                        : fallback;
  ReliabilityVector out = r;
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    if (!out.values[c].has_value()) {
      out.values[c] = fill;
      log_info("reliability for class " + std::to_string(c) +
               " undefined; using " + std::to_string(fill));
    }
  }
  return out;
}

}  // namespace encore
