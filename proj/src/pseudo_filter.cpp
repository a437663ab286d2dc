#include "encore/pseudo_filter.hpp"

#include <algorithm>

#include "encore/errors.hpp"

namespace encore {

double clamp_threshold(double v) {
  return std::clamp(v, kThresholdFloor, kThresholdCeil);
}

ThresholdVector ThresholdVector::uniform(std::size_t class_count, double value,
                                         std::string provenance) {
  ThresholdVector t;
  t.tau.assign(class_count, clamp_threshold(value));
  t.provenance = std::move(provenance);
  return t;
}

void ThresholdVector::validate() const {
  if (tau.empty()) {
    throw ValidationError("threshold vector is empty");
  }
  for (const double v : tau) {
    if (!(v >= kThresholdFloor && v <= kThresholdCeil)) {
      throw ValidationError("threshold " + std::to_string(v) +
                            " outside clamp band");
    }
  }
}

LabelMask filter(const Grid& probs, const ThresholdVector& tau) {
  tau.validate();
  if (probs.channels() != tau.tau.size()) {
    throw ShapeError("filter: threshold length does not match class count");
  }
  LabelMask mask = argmax_channel(probs);
  const Grid confidence = max_channel(probs);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double t = tau.tau[static_cast<std::size_t>(mask.labels[i])];
    mask.keep[i] = confidence.data[i] >= t ? 1 : 0;
  }
  return mask;
}

KeepFractions keep_fraction(const LabelMask& mask, std::size_t class_count) {
  KeepFractions out;
  out.per_class.assign(class_count, 0.0);
  std::vector<std::size_t> labeled(class_count, 0);
  std::vector<std::size_t> kept(class_count, 0);
  std::size_t kept_total = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = static_cast<std::size_t>(mask.labels[i]);
    if (c >= class_count) {
      throw ValidationError("keep_fraction: label exceeds class count");
    }
    ++labeled[c];
    if (mask.keep[i] != 0) {
      ++kept[c];
      ++kept_total;
    }
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    out.per_class[c] = labeled[c] == 0 ? 0.0
                                       : static_cast<double>(kept[c]) /
                                             static_cast<double>(labeled[c]);
  }
  out.overall = mask.size() == 0 ? 0.0
                                 : static_cast<double>(kept_total) /
                                       static_cast<double>(mask.size());
  return out;
}

}  // namespace encore
