#include "encore/segmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "json.hpp"

#include "encore/errors.hpp"

namespace encore {

namespace {

using nlohmann::json;

// Clamped-window box statistics via (H+1)x(W+1) summed-area tables.
void local_stats(const Grid& image, std::size_t channel, int radius,
                 double* mean_out, double* std_out) {
  const std::size_t h = image.shape[1];
  const std::size_t w = image.shape[2];
  const std::size_t plane = h * w;
  const double* src = image.data.data() + channel * plane;

  std::vector<double> sum((h + 1) * (w + 1), 0.0);
  std::vector<double> sq((h + 1) * (w + 1), 0.0);
  const std::size_t stride = w + 1;
  for (std::size_t y = 0; y < h; ++y) {
    double row_sum = 0.0;
    double row_sq = 0.0;
    for (std::size_t x = 0; x < w; ++x) {
      const double v = src[y * w + x];
      row_sum += v;
      row_sq += v * v;
      sum[(y + 1) * stride + (x + 1)] = sum[y * stride + (x + 1)] + row_sum;
      sq[(y + 1) * stride + (x + 1)] = sq[y * stride + (x + 1)] + row_sq;
    }
  }

  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t y0 = y >= static_cast<std::size_t>(radius)
                               ? y - static_cast<std::size_t>(radius)
                               : 0;
    const std::size_t y1 = std::min(h - 1, y + static_cast<std::size_t>(radius));
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t x0 = x >= static_cast<std::size_t>(radius)
                                 ? x - static_cast<std::size_t>(radius)
                                 : 0;
      const std::size_t x1 =
          std::min(w - 1, x + static_cast<std::size_t>(radius));
      const double count =
          static_cast<double>((y1 - y0 + 1) * (x1 - x0 + 1));
      const double s = sum[(y1 + 1) * stride + (x1 + 1)] -
                       sum[y0 * stride + (x1 + 1)] -
                       sum[(y1 + 1) * stride + x0] + sum[y0 * stride + x0];
      const double s2 = sq[(y1 + 1) * stride + (x1 + 1)] -
                        sq[y0 * stride + (x1 + 1)] - sq[(y1 + 1) * stride + x0] +
                        sq[y0 * stride + x0];
      const double m = s / count;
      const double var = std::max(0.0, s2 / count - m * m);
      mean_out[y * w + x] = m;
      std_out[y * w + x] = std::sqrt(var);
    }
  }
}

void require_features(const SegModel& model, const Grid& feats) {
  if (feats.rank() != 3 || feats.shape[0] != model.feature_count) {
    throw ShapeError("feature map does not match model feature count");
  }
}

ParamGrads zero_grads(const SegModel& model) {
  ParamGrads g;
  if (model.hidden_units == 0) {
    g.w = Grid({model.class_count, model.feature_count});
  } else {
    g.w1 = Grid({model.hidden_units, model.feature_count});
    g.w2 = Grid({model.class_count, model.hidden_units});
  }
  g.b = Grid({model.class_count});
  return g;
}

// Accumulates loss and parameter gradients for one image; returns the kept
// pixel count. Gradients are raw sums; the caller divides by the total.
std::size_t accumulate_image(const SegModel& model, const Grid& feats,
                             const LabelMask& target, double& loss_sum,
                             ParamGrads& grads) {
  const std::size_t h = feats.shape[1];
  const std::size_t w = feats.shape[2];
  if (target.height != h || target.width != w) {
    throw ShapeError("target mask does not match feature map extent");
  }
  const std::size_t plane = h * w;
  const std::size_t fc = model.feature_count;
  const std::size_t cc = model.class_count;
  const std::size_t hu = model.hidden_units;

  std::vector<double> f(fc);
  std::vector<double> hid(hu);
  std::vector<double> z(cc);
  std::vector<double> p(cc);
  std::size_t kept = 0;

  for (std::size_t px = 0; px < plane; ++px) {
    if (target.keep[px] == 0) {
      continue;
    }
    const int t = target.labels[px];
    if (t < 0 || static_cast<std::size_t>(t) >= cc) {
      throw ValidationError("target label out of range: " + std::to_string(t));
    }
    ++kept;
    for (std::size_t k = 0; k < fc; ++k) {
      f[k] = feats.data[k * plane + px];
    }
    if (hu == 0) {
      for (std::size_t c = 0; c < cc; ++c) {
        double acc = model.b.data[c];
        const double* wr = model.w.data.data() + c * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          acc += wr[k] * f[k];
        }
        z[c] = acc;
      }
    } else {
      for (std::size_t u = 0; u < hu; ++u) {
        double acc = 0.0;
        const double* wr = model.w1.data.data() + u * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          acc += wr[k] * f[k];
        }
        hid[u] = std::tanh(acc);
      }
      for (std::size_t c = 0; c < cc; ++c) {
        double acc = model.b.data[c];
        const double* wr = model.w2.data.data() + c * hu;
        for (std::size_t u = 0; u < hu; ++u) {
          acc += wr[u] * hid[u];
        }
        z[c] = acc;
      }
    }

    double mx = z[0];
    for (std::size_t c = 1; c < cc; ++c) {
      mx = std::max(mx, z[c]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < cc; ++c) {
      p[c] = std::exp(z[c] - mx);
      sum += p[c];
    }
    const double inv = 1.0 / sum;
    for (std::size_t c = 0; c < cc; ++c) {
      p[c] *= inv;
    }
    loss_sum += -std::log(std::max(p[static_cast<std::size_t>(t)], 1e-300));

    // dL/dz = p - onehot(t), per pixel.
    p[static_cast<std::size_t>(t)] -= 1.0;
    if (hu == 0) {
      for (std::size_t c = 0; c < cc; ++c) {
        const double g = p[c];
        double* gw = grads.w.data.data() + c * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          gw[k] += g * f[k];
        }
        grads.b.data[c] += g;
      }
    } else {
      for (std::size_t c = 0; c < cc; ++c) {
        const double g = p[c];
        double* gw = grads.w2.data.data() + c * hu;
        for (std::size_t u = 0; u < hu; ++u) {
          gw[u] += g * hid[u];
        }
        grads.b.data[c] += g;
      }
      for (std::size_t u = 0; u < hu; ++u) {
        double dh = 0.0;
        for (std::size_t c = 0; c < cc; ++c) {
          dh += model.w2.data[c * hu + u] * p[c];
        }
        const double dpre = (1.0 - hid[u] * hid[u]) * dh;
        double* gw = grads.w1.data.data() + u * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          gw[k] += dpre * f[k];
        }
      }
    }
  }
  return kept;
}

void scale_grid(Grid& g, double s) {
  for (double& v : g.data) {
    v *= s;
  }
}

void finalize(LossReport& report, double loss_sum, std::size_t kept) {
  report.contributing_pixels = kept;
  if (kept == 0) {
    report.loss = 0.0;
    return;
  }
  const double inv = 1.0 / static_cast<double>(kept);
  report.loss = loss_sum * inv;
  scale_grid(report.grads.w, inv);
  scale_grid(report.grads.b, inv);
  scale_grid(report.grads.w1, inv);
  scale_grid(report.grads.w2, inv);
}

void step_grid(Grid& param, const Grid& grad, double lr) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    param.data[i] -= lr * grad.data[i];
  }
}

void ema_grid(Grid& teacher, const Grid& student, double decay) {
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    teacher.data[i] =
        decay * teacher.data[i] + (1.0 - decay) * student.data[i];
  }
}

json grid_to_json(const Grid& g) {
  return {{"shape", g.shape}, {"data", g.data}};
}

Grid grid_from_json(const json& j) {
  Grid g(j.at("shape").get<std::vector<std::size_t>>());
  g.data = j.at("data").get<std::vector<double>>();
  if (g.data.size() != g.size()) {
    throw IoError("checkpoint grid data does not match its shape");
  }
  return g;
}

}  // namespace

Grid FeatureExtractor::features(const Grid& image) const {
  if (image.rank() != 3) {
    throw ShapeError("features: expected a (ch,H,W) image");
  }
  const std::size_t ch = image.shape[0];
  const std::size_t h = image.shape[1];
  const std::size_t w = image.shape[2];
  const std::size_t plane = h * w;
  Grid out({feature_count(ch), h, w});

  for (std::size_t c = 0; c < ch; ++c) {
    double* raw = out.data.data() + (c * 3) * plane;
    std::copy_n(image.data.data() + c * plane, plane, raw);
    local_stats(image, c, radius, out.data.data() + (c * 3 + 1) * plane,
                out.data.data() + (c * 3 + 2) * plane);
  }
  double* xs = out.data.data() + (ch * 3) * plane;
  double* ys = out.data.data() + (ch * 3 + 1) * plane;
  for (std::size_t y = 0; y < h; ++y) {
    const double yn = (static_cast<double>(y) + 0.5) / static_cast<double>(h);
    for (std::size_t x = 0; x < w; ++x) {
      xs[y * w + x] = (static_cast<double>(x) + 0.5) / static_cast<double>(w);
      ys[y * w + x] = yn;
    }
  }
  return out;
}

SegModel SegModel::init(std::size_t classes, std::size_t image_channels,
                        std::size_t hidden, const FeatureExtractor& fx,
                        Rng& rng) {
  if (classes < 2) {
    throw ValidationError("model needs at least 2 classes");
  }
  SegModel m;
  m.extractor = fx;
  m.class_count = classes;
  m.feature_count = fx.feature_count(image_channels);
  m.hidden_units = hidden;
  m.b = Grid({classes});
  if (hidden == 0) {
    m.w = Grid({classes, m.feature_count});
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.feature_count));
    for (double& v : m.w.data) {
      v = rng.normal(0.0, scale);
    }
  } else {
    m.w1 = Grid({hidden, m.feature_count});
    m.w2 = Grid({classes, hidden});
    const double s1 = 1.0 / std::sqrt(static_cast<double>(m.feature_count));
    for (double& v : m.w1.data) {
      v = rng.normal(0.0, s1);
    }
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& v : m.w2.data) {
      v = rng.normal(0.0, s2);
    }
  }
  return m;
}

bool SegModel::same_architecture(const SegModel& other) const {
  return class_count == other.class_count &&
         feature_count == other.feature_count &&
         hidden_units == other.hidden_units &&
         extractor.radius == other.extractor.radius;
}

bool ParamGrads::all_finite() const {
  return w.all_finite() && b.all_finite() && w1.all_finite() &&
         w2.all_finite();
}

Grid forward(const SegModel& model, const Grid& image) {
  return forward_on_features(model, model.extractor.features(image));
}

Grid forward_on_features(const SegModel& model, const Grid& feats) {
  require_features(model, feats);
  const std::size_t h = feats.shape[1];
  const std::size_t w = feats.shape[2];
  const std::size_t plane = h * w;
  const std::size_t fc = model.feature_count;
  const std::size_t cc = model.class_count;
  const std::size_t hu = model.hidden_units;
  Grid logits({cc, h, w});

  std::vector<double> f(fc);
  std::vector<double> hid(hu);
  for (std::size_t px = 0; px < plane; ++px) {
    for (std::size_t k = 0; k < fc; ++k) {
      f[k] = feats.data[k * plane + px];
    }
    if (hu == 0) {
      for (std::size_t c = 0; c < cc; ++c) {
        double acc = model.b.data[c];
        const double* wr = model.w.data.data() + c * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          acc += wr[k] * f[k];
        }
        logits.data[c * plane + px] = acc;
      }
    } else {
      for (std::size_t u = 0; u < hu; ++u) {
        double acc = 0.0;
        const double* wr = model.w1.data.data() + u * fc;
        for (std::size_t k = 0; k < fc; ++k) {
          acc += wr[k] * f[k];
        }
        hid[u] = std::tanh(acc);
      }
      for (std::size_t c = 0; c < cc; ++c) {
        double acc = model.b.data[c];
        const double* wr = model.w2.data.data() + c * hu;
        for (std::size_t u = 0; u < hu; ++u) {
          acc += wr[u] * hid[u];
        }
        logits.data[c * plane + px] = acc;
      }
    }
  }
  return logits;
}

LossReport masked_ce_loss(const SegModel& model, const Grid& image,
                          const LabelMask& target) {
  return masked_ce_loss_on_features(model, model.extractor.features(image),
                                    target);
}

LossReport masked_ce_loss_on_features(const SegModel& model, const Grid& feats,
                                      const LabelMask& target) {
  require_features(model, feats);
  LossReport report;
  report.grads = zero_grads(model);
  double loss_sum = 0.0;
  const std::size_t kept =
      accumulate_image(model, feats, target, loss_sum, report.grads);
  finalize(report, loss_sum, kept);
  return report;
}

LossReport masked_ce_loss_batch(const SegModel& model,
                                std::span<const Grid> feats,
                                std::span<const LabelMask> targets) {
  if (feats.size() != targets.size()) {
    throw ShapeError("batch feature/target list size mismatch");
  }
  LossReport report;
  report.grads = zero_grads(model);
  double loss_sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    require_features(model, feats[i]);
    kept += accumulate_image(model, feats[i], targets[i], loss_sum,
                             report.grads);
  }
  finalize(report, loss_sum, kept);
  return report;
}

void sgd_step(SegModel& model, const ParamGrads& grads, double lr) {
  if (!(lr > 0.0)) {
    throw ValidationError("learning rate must be positive");
  }
  if (!grads.all_finite()) {
    throw TrainingError("non-finite gradients at step " +
                            std::to_string(model.step),
                        model.step);
  }
  if (model.hidden_units == 0) {
    step_grid(model.w, grads.w, lr);
  } else {
    step_grid(model.w1, grads.w1, lr);
    step_grid(model.w2, grads.w2, lr);
  }
  step_grid(model.b, grads.b, lr);
  ++model.step;
}

double poly_lr(double lr_init, std::size_t iter, std::size_t total_iter) {
  if (iter >= total_iter) {
    throw ScheduleError("poly_lr: iter " + std::to_string(iter) +
                        " >= total " + std::to_string(total_iter));
  }
  const double frac =
      1.0 - static_cast<double>(iter) / static_cast<double>(total_iter);
  return lr_init * std::pow(frac, 0.9);
}

void ema_update(SegModel& teacher, const SegModel& student, double decay) {
  if (!teacher.same_architecture(student)) {
    throw ValidationError("ema_update: architecture mismatch");
  }
  if (!(decay >= 0.0 && decay <= 1.0)) {
    throw ValidationError("ema decay must be in [0,1]");
  }
  if (teacher.hidden_units == 0) {
    ema_grid(teacher.w, student.w, decay);
  } else {
    ema_grid(teacher.w1, student.w1, decay);
    ema_grid(teacher.w2, student.w2, decay);
  }
  ema_grid(teacher.b, student.b, decay);
}

void save_model(const std::filesystem::path& path, const SegModel& model) {
  json j = {{"class_count", model.class_count},
            {"feature_count", model.feature_count},
            {"hidden_units", model.hidden_units},
            {"radius", model.extractor.radius},
            {"step", model.step},
            {"b", grid_to_json(model.b)}};
  if (model.hidden_units == 0) {
    j["w"] = grid_to_json(model.w);
  } else {
    j["w1"] = grid_to_json(model.w1);
    j["w2"] = grid_to_json(model.w2);
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write checkpoint: " + path.string());
  }
  out << j.dump(2) << "\n";
}

SegModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  SegModel m;
  m.class_count = j.at("class_count").get<std::size_t>();
  m.feature_count = j.at("feature_count").get<std::size_t>();
  m.hidden_units = j.at("hidden_units").get<std::size_t>();
  m.extractor.radius = j.at("radius").get<int>();
  m.step = j.at("step").get<std::uint64_t>();
  m.b = grid_from_json(j.at("b"));
  if (m.hidden_units == 0) {
    m.w = grid_from_json(j.at("w"));
  } else {
    m.w1 = grid_from_json(j.at("w1"));
    m.w2 = grid_from_json(j.at("w2"));
  }
  return m;
}

}  // namespace encore
