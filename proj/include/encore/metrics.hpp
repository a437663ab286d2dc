#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "encore/grid.hpp"

namespace encore {

// Per-class Dice accounting. A class absent from both masks scores 1.0 but is
// flagged absent; the foreground mean covers only classes present in the
// ground truth, and never class 0.
struct DiceReport {
  struct ClassEntry {
    double dice = 0.0;
    bool absent = false;  // in neither mask
    std::size_t pred_pixels = 0;
    std::size_t truth_pixels = 0;
    std::size_t overlap = 0;
  };
  std::vector<ClassEntry> per_class;
  std::optional<double> mean_foreground;  // empty when truth has no foreground
};

DiceReport dice(const LabelMask& pred, const LabelMask& truth,
                std::size_t class_count);

// One CSV row: id, per-class dice (blank when absent), foreground mean.
std::string dice_csv_row(std::size_t sample_id, const DiceReport& report);
std::string dice_csv_header(std::size_t class_count);

}  // namespace encore
