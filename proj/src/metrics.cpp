#include "encore/metrics.hpp"

#include <cstdio>

#include "encore/errors.hpp"

namespace encore {

DiceReport dice(const LabelMask& pred, const LabelMask& truth,
                std::size_t class_count) {
  if (pred.height != truth.height || pred.width != truth.width) {
    throw ShapeError("dice: mask extents differ");
  }
  if (class_count < 2) {
    throw ValidationError("dice: class count must be at least 2");
  }
  DiceReport report;
  report.per_class.resize(class_count);

  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = pred.labels[i];
    const int t = truth.labels[i];
    if (p < 0 || static_cast<std::size_t>(p) >= class_count || t < 0 ||
        static_cast<std::size_t>(t) >= class_count) {
      throw ValidationError("dice: label outside [0, class_count)");
    }
    ++report.per_class[static_cast<std::size_t>(p)].pred_pixels;
    ++report.per_class[static_cast<std::size_t>(t)].truth_pixels;
    if (p == t) {
      ++report.per_class[static_cast<std::size_t>(p)].overlap;
    }
  }

  double fg_sum = 0.0;
  std::size_t fg_count = 0;
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& e = report.per_class[c];
    const std::size_t denom = e.pred_pixels + e.truth_pixels;
    if (denom == 0) {
      e.dice = 1.0;
      e.absent = true;
    } else {
      e.dice = 2.0 * static_cast<double>(e.overlap) /
               static_cast<double>(denom);
    }
    if (c > 0 && e.truth_pixels > 0) {
      fg_sum += e.dice;
      ++fg_count;
    }
  }
  if (fg_count > 0) {
    report.mean_foreground = fg_sum / static_cast<double>(fg_count);
  }
  return report;
}

std::string dice_csv_header(std::size_t class_count) {
  std::string row = "id";
  for (std::size_t c = 1; c < class_count; ++c) {
    row += ",dice_" + std::to_string(c);
  }
  row += ",mean_foreground";
  return row;
}

std::string dice_csv_row(std::size_t sample_id, const DiceReport& report) {
  char buf[32];
  std::string row = std::to_string(sample_id);
  for (std::size_t c = 1; c < report.per_class.size(); ++c) {
    row += ",";
    if (!report.per_class[c].absent) {
      std::snprintf(buf, sizeof(buf), "%.6f", report.per_class[c].dice);
      row += buf;
    }
  }
  row += ",";
  if (report.mean_foreground.has_value()) {
    std::snprintf(buf, sizeof(buf), "%.6f", *report.mean_foreground);
    row += buf;
  }
  return row;
}

}  // namespace encore
