#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace encore {

// Dense row-major array of doubles with an explicit shape. Deliberately
// minimal: no broadcasting, no views. A (C,H,W) grid holds images, logits or
// probability maps; 2-D and 1-D grids hold model parameters.
struct Grid {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Grid() = default;
  explicit Grid(std::vector<std::size_t> dims, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  // (C,H,W) helpers; throw ShapeError when the grid is not rank 3.
  std::size_t channels() const;
  std::size_t height() const;
  std::size_t width() const;

  double& at(std::size_t i) { return data[i]; }
  double at(std::size_t i) const { return data[i]; }
  double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data[i * shape[1] + j];
  }
  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * shape[1] + y) * shape[2] + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * shape[1] + y) * shape[2] + x];
  }

  bool same_shape(const Grid& other) const { return shape == other.shape; }
  bool all_finite() const;
};

// Per-pixel integer class map plus a keep/ignore mask of equal extent.
struct LabelMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<int> labels;
  std::vector<std::uint8_t> keep;

  LabelMask() = default;
  LabelMask(std::size_t h, std::size_t w, int fill_label = 0,
            bool fill_keep = true);

  std::size_t size() const { return labels.size(); }
  int label(std::size_t y, std::size_t x) const {
    return labels[y * width + x];
  }
  int& label(std::size_t y, std::size_t x) { return labels[y * width + x]; }
  bool kept(std::size_t y, std::size_t x) const {
    return keep[y * width + x] != 0;
  }
  std::size_t kept_count() const;
};

// Numerically stabilized per-pixel softmax over the channel axis.
// Requires C >= 2; output channels sum to 1 within 1e-9 per pixel.
Grid softmax(const Grid& logits);

// Per-pixel index of the maximal channel; ties break to the lowest index.
// The returned mask keeps every pixel.
LabelMask argmax_channel(const Grid& probs);

// Per-pixel maximum over channels, as a (1,H,W) grid.
Grid max_channel(const Grid& probs);

}  // namespace encore
