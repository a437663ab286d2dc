#include "encore/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "encore/errors.hpp"

namespace encore {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& dims) {
  if (dims.empty()) {
    throw ShapeError("grid shape must have at least one dimension");
  }
  std::size_t n = 1;
  for (const std::size_t d : dims) {
    if (d == 0) {
      throw ShapeError("grid dimensions must be positive");
    }
    n *= d;
  }
  return n;
}

void require_chw(const Grid& g, const char* what) {
  if (g.rank() != 3) {
    throw ShapeError(std::string(what) + ": expected a (C,H,W) grid, got rank " +
                     std::to_string(g.rank()));
  }
}

}  // namespace

Grid::Grid(std::vector<std::size_t> dims, double fill)
    : shape(std::move(dims)), data(checked_product(shape), fill) {}

std::size_t Grid::channels() const {
  require_chw(*this, "channels");
  return shape[0];
}

std::size_t Grid::height() const {
  require_chw(*this, "height");
  return shape[1];
}

std::size_t Grid::width() const {
  require_chw(*this, "width");
  return shape[2];
}

bool Grid::all_finite() const {
  return std::all_of(data.begin(), data.end(),
                     [](double v) { return std::isfinite(v); });
}

LabelMask::LabelMask(std::size_t h, std::size_t w, int fill_label,
                     bool fill_keep)
    : height(h),
      width(w),
      labels(h * w, fill_label),
      keep(h * w, fill_keep ? 1 : 0) {
  if (h == 0 || w == 0) {
    throw ShapeError("label mask dimensions must be positive");
  }
}

std::size_t LabelMask::kept_count() const {
  std::size_t n = 0;
  for (const std::uint8_t k : keep) {
    n += k != 0;
  }
  return n;
}

Grid softmax(const Grid& logits) {
  require_chw(logits, "softmax");
  const std::size_t c_count = logits.shape[0];
  if (c_count < 2) {
    throw ShapeError("softmax requires at least 2 channels");
  }
  const std::size_t plane = logits.shape[1] * logits.shape[2];
  Grid out(logits.shape);
  for (std::size_t p = 0; p < plane; ++p) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < c_count; ++c) {
      mx = std::max(mx, logits.data[c * plane + p]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < c_count; ++c) {
      const double e = std::exp(logits.data[c * plane + p] - mx);
      out.data[c * plane + p] = e;
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (std::size_t c = 0; c < c_count; ++c) {
      out.data[c * plane + p] *= inv;
    }
  }
  return out;
}

LabelMask argmax_channel(const Grid& probs) {
  require_chw(probs, "argmax_channel");
  const std::size_t c_count = probs.shape[0];
  if (c_count < 2) {
    throw ShapeError("argmax_channel requires at least 2 channels");
  }
  const std::size_t plane = probs.shape[1] * probs.shape[2];
  LabelMask mask(probs.shape[1], probs.shape[2]);
  for (std::size_t p = 0; p < plane; ++p) {
    int best = 0;
    double best_v = probs.data[p];
    for (std::size_t c = 1; c < c_count; ++c) {
      const double v = probs.data[c * plane + p];
      if (v > best_v) {
        best_v = v;
        best = static_cast<int>(c);
      }
    }
    mask.labels[p] = best;
  }
  return mask;
}

Grid max_channel(const Grid& probs) {
  require_chw(probs, "max_channel");
  const std::size_t c_count = probs.shape[0];
  const std::size_t plane = probs.shape[1] * probs.shape[2];
  Grid out({1, probs.shape[1], probs.shape[2]});
  for (std::size_t p = 0; p < plane; ++p) {
    double mx = probs.data[p];
    for (std::size_t c = 1; c < c_count; ++c) {
      mx = std::max(mx, probs.data[c * plane + p]);
    }
    out.data[p] = mx;
  }
  return out;
}

}  // namespace encore
