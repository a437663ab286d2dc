#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace encore {

// Dimension / rank mismatches on grids and masks.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument values (out-of-range alphas, unnormalized probabilities, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scene synthesis failure; carries the class whose shape could not be placed.
struct GenerationError : std::runtime_error {
  int class_index;
  GenerationError(const std::string& msg, int cls)
      : std::runtime_error(msg), class_index(cls) {}
};

// Learning-rate schedule misuse (iter >= total_iter).
struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Divergence or non-finite gradients; carries the step index.
struct TrainingError : std::runtime_error {
  std::uint64_t step;
  TrainingError(const std::string& msg, std::uint64_t at)
      : std::runtime_error(msg), step(at) {}
};

// Config file problems; one message per offending field.
struct ConfigError : std::runtime_error {
  std::vector<std::string> issues;
  explicit ConfigError(std::vector<std::string> list)
      : std::runtime_error(join(list)), issues(std::move(list)) {}

 private:
  static std::string join(const std::vector<std::string>& list) {
    std::string out = "invalid config:";
    for (const auto& s : list) {
      out += "\n  - " + s;
    }
    return out;
  }
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace encore
