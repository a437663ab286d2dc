#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "encore/grid.hpp"

namespace encore {

enum class ReliabilityMode { recall, tp_confidence };

std::string to_string(ReliabilityMode mode);
ReliabilityMode reliability_mode_from_string(const std::string& s);

// Class-wise reliability indicator estimated from the labeled set. Entries
// are undefined exactly for classes that never occur in any ground truth.
struct ReliabilityVector {
  ReliabilityMode mode = ReliabilityMode::tp_confidence;
  std::vector<std::optional<double>> values;  // per class, in [0,1]
  std::vector<std::size_t> source_samples;    // images containing the class

  std::size_t class_count() const { return values.size(); }
  nlohmann::json to_json() const;
};

// recall:        mean over images containing c of (correct-c pixels / N_i^c).
// tp_confidence: mean over images containing c of the mean class-c softmax
//                probability at true-positive pixels (0 when the image has
//                the class but no true positives).
// Images lacking the class are skipped; classes never present stay undefined.
ReliabilityVector compute_reliability(std::span<const Grid> probs,
                                      std::span<const LabelMask> truths,
                                      ReliabilityMode mode);

// Undefined entries become the mean of the defined ones, or `fallback` when
// nothing is defined.
ReliabilityVector resolve_undefined(const ReliabilityVector& r,
                                    double fallback = 0.95);

}  // namespace encore
