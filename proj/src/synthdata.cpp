#include "encore/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "encore/errors.hpp"
#include "encore/grid_io.hpp"
#include "encore/log.hpp"

namespace encore {

namespace {

using nlohmann::json;

Rng sample_rng(std::uint64_t seed, std::size_t index) {
  const std::uint64_t mixed =
      Rng::splitmix64(Rng::splitmix64(seed) ^
                      (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1)));
  return Rng(mixed);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Center coordinate with margin; throws when the shape cannot fit.
double place_center(Rng& rng, double extent, double radius, int class_index) {
  const double lo = radius + 1.0;
  const double hi = extent - 2.0 - radius;
  if (hi < lo) {
    throw GenerationError(
        "shape for class " + std::to_string(class_index) +
            " does not fit in a " + std::to_string(static_cast<int>(extent)) +
            "px extent",
        class_index);
  }
  return rng.uniform(lo, hi);
}

void draw_class_shape(LabelMask& truth, const ClassSpec& cls, int class_index,
                      Rng& rng) {
  const double h = static_cast<double>(truth.height);
  const double w = static_cast<double>(truth.width);
  const double min_extent = std::min(h, w);

  switch (cls.shape) {
    case ShapeKind::disk: {
      const double r = std::max(2.0, rng.uniform(0.10, 0.18) * min_extent);
      const double cx = place_center(rng, w, r, class_index);
      const double cy = place_center(rng, h, r, class_index);
      for (std::size_t y = 0; y < truth.height; ++y) {
        for (std::size_t x = 0; x < truth.width; ++x) {
          const double dx = static_cast<double>(x) - cx;
          const double dy = static_cast<double>(y) - cy;
          if (dx * dx + dy * dy <= r * r) {
            truth.label(y, x) = class_index;
          }
        }
      }
      break;
    }
    case ShapeKind::rectangle: {
      const double hx = std::max(2.0, rng.uniform(0.08, 0.16) * w);
      const double hy = std::max(2.0, rng.uniform(0.08, 0.16) * h);
      const double cx = place_center(rng, w, hx, class_index);
      const double cy = place_center(rng, h, hy, class_index);
      for (std::size_t y = 0; y < truth.height; ++y) {
        for (std::size_t x = 0; x < truth.width; ++x) {
          if (std::abs(static_cast<double>(x) - cx) <= hx &&
              std::abs(static_cast<double>(y) - cy) <= hy) {
            truth.label(y, x) = class_index;
          }
        }
      }
      break;
    }
    case ShapeKind::ring: {
      const double outer = std::max(3.0, rng.uniform(0.14, 0.22) * min_extent);
      const double inner = outer - std::max(1.6, 0.30 * outer);
      const double cx = place_center(rng, w, outer, class_index);
      const double cy = place_center(rng, h, outer, class_index);
      for (std::size_t y = 0; y < truth.height; ++y) {
        for (std::size_t x = 0; x < truth.width; ++x) {
          const double dx = static_cast<double>(x) - cx;
          const double dy = static_cast<double>(y) - cy;
          const double d2 = dx * dx + dy * dy;
          if (d2 <= outer * outer && d2 >= inner * inner) {
            truth.label(y, x) = class_index;
          }
        }
      }
      break;
    }
  }
}

Sample generate_one(const SceneSpec& spec, std::size_t index) {
  Rng rng = sample_rng(spec.seed, index);
  Sample s;
  s.id = index;
  s.truth = LabelMask(spec.height, spec.width, 0);
  for (std::size_t c = 0; c < spec.foreground.size(); ++c) {
    draw_class_shape(s.truth, spec.foreground[c], static_cast<int>(c + 1), rng);
  }
  s.image = Grid({1, spec.height, spec.width});
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    const int owner = s.truth.labels[i];
    const double mean = owner == 0 ? spec.background_intensity
                                   : spec.foreground[owner - 1].intensity;
    const double sigma = owner == 0 ? spec.background_sigma
                                    : spec.foreground[owner - 1].noise_sigma;
    s.image.data[i] = clamp01(mean + sigma * rng.normal());
  }
  return s;
}

std::string sample_stem(const char* role, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%05zu", role, index);
  return buf;
}

void check_known_keys(const json& j, const std::set<std::string>& allowed,
                      const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::disk:
      return "disk";
    case ShapeKind::rectangle:
      return "rectangle";
    case ShapeKind::ring:
      return "ring";
  }
  return "disk";
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "disk") {
    return ShapeKind::disk;
  }
  if (s == "rectangle") {
    return ShapeKind::rectangle;
  }
  if (s == "ring") {
    return ShapeKind::ring;
  }
  throw ValidationError("unknown shape kind: " + s);
}

void SceneSpec::validate() const {
  if (height < 8 || width < 8) {
    throw ValidationError("scene dimensions must be at least 8x8");
  }
  if (foreground.empty()) {
    throw ValidationError("scene needs at least one foreground class");
  }
  if (!(background_intensity >= 0.0 && background_intensity <= 1.0)) {
    throw ValidationError("background intensity must be in [0,1]");
  }
  if (!(background_sigma >= 0.0) || !std::isfinite(background_sigma)) {
    throw ValidationError("background noise sigma must be finite and >= 0");
  }
  for (std::size_t i = 0; i < foreground.size(); ++i) {
    const auto& cls = foreground[i];
    if (!(cls.intensity >= 0.0 && cls.intensity <= 1.0)) {
      throw ValidationError("class " + std::to_string(i + 1) +
                            " intensity must be in [0,1]");
    }
    if (!(cls.noise_sigma >= 0.0) || !std::isfinite(cls.noise_sigma)) {
      throw ValidationError("class " + std::to_string(i + 1) +
                            " noise sigma must be finite and >= 0");
    }
  }
}

json SceneSpec::to_json() const {
  json classes = json::array();
  for (const auto& cls : foreground) {
    classes.push_back({{"shape", encore::to_string(cls.shape)},
                       {"intensity", cls.intensity},
                       {"noise_sigma", cls.noise_sigma}});
  }
  return {{"height", height},
          {"width", width},
          {"seed", seed},
          {"background",
           {{"intensity", background_intensity},
            {"noise_sigma", background_sigma}}},
          {"classes", classes}};
}

SceneSpec SceneSpec::from_json(const json& j) {
  check_known_keys(j, {"height", "width", "seed", "background", "classes"},
                   "scene spec");
  SceneSpec spec;
  try {
    spec.height = j.at("height").get<std::size_t>();
    spec.width = j.at("width").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("background")) {
      const auto& bg = j.at("background");
      check_known_keys(bg, {"intensity", "noise_sigma"}, "scene background");
      spec.background_intensity = bg.value("intensity", 0.2);
      spec.background_sigma = bg.value("noise_sigma", 0.05);
    }
    spec.foreground.clear();
    for (const auto& cj : j.at("classes")) {
      check_known_keys(cj, {"shape", "intensity", "noise_sigma"},
                       "scene class");
      ClassSpec cls;
      cls.shape = shape_kind_from_string(cj.at("shape").get<std::string>());
      cls.intensity = cj.at("intensity").get<double>();
      cls.noise_sigma = cj.value("noise_sigma", 0.0);
      spec.foreground.push_back(cls);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SceneSpec SceneSpec::benchmark_default() {
  SceneSpec spec;
  spec.height = 64;
  spec.width = 64;
  spec.background_intensity = 0.20;
  spec.background_sigma = 0.05;
  spec.foreground = {
      {ShapeKind::disk, 0.50, 0.02},
      {ShapeKind::rectangle, 0.72, 0.12},
      {ShapeKind::ring, 0.92, 0.30},
  };
  spec.seed = 1;
  return spec;
}

std::size_t SplitSpec::labeled_count() const {
  const double raw = std::floor(labeled_fraction * static_cast<double>(total));
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

void SplitSpec::validate() const {
  if (total == 0) {
    throw ValidationError("split total must be positive");
  }
  static constexpr double kAllowed[] = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  const bool ok = std::any_of(std::begin(kAllowed), std::end(kAllowed),
                              [&](double f) { return f == labeled_fraction; });
  if (!ok) {
    throw ValidationError(
        "labeled fraction must be one of 1/2, 1/4, 1/8, 1/16, 1/32");
  }
}

std::vector<Sample> generate(const SceneSpec& spec, std::size_t count) {
  if (count < 1) {
    throw ValidationError("sample count must be at least 1");
  }
  spec.validate();
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(generate_one(spec, i));
  }
  return out;
}

SplitIndices split_indices(const SplitSpec& spec) {
  spec.validate();
  std::vector<std::size_t> order(spec.total);
  for (std::size_t i = 0; i < spec.total; ++i) {
    order[i] = i;
  }
  Rng rng = Rng::derive(spec.seed, "split");
  for (std::size_t i = spec.total - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(order[i], order[j]);
  }
  const std::size_t k = spec.labeled_count();
  SplitIndices idx;
  idx.labeled.assign(order.begin(), order.begin() + static_cast<long>(k));
  idx.unlabeled.assign(order.begin() + static_cast<long>(k), order.end());
  std::sort(idx.labeled.begin(), idx.labeled.end());
  std::sort(idx.unlabeled.begin(), idx.unlabeled.end());
  return idx;
}

std::pair<std::vector<Sample>, std::vector<Sample>> split(
    const std::vector<Sample>& samples, const SplitSpec& spec) {
  if (samples.size() != spec.total) {
    throw ValidationError("split total does not match sample list size");
  }
  const SplitIndices idx = split_indices(spec);
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (const std::size_t i : idx.labeled) {
    out.first.push_back(samples[i]);
  }
  for (const std::size_t i : idx.unlabeled) {
    out.second.push_back(samples[i]);
  }
  return out;
}

Sample hflip(const Sample& s) {
  Sample out = s;
  const std::size_t h = s.truth.height;
  const std::size_t w = s.truth.width;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t mx = w - 1 - x;
      out.image.at(0, y, x) = s.image.at(0, y, mx);
      out.truth.labels[y * w + x] = s.truth.labels[y * w + mx];
      out.truth.keep[y * w + x] = s.truth.keep[y * w + mx];
    }
  }
  return out;
}

Grid intensity_map(const Grid& image, const Grid& additive_noise,
                   double contrast_factor) {
  if (!image.same_shape(additive_noise)) {
    throw ShapeError("intensity_map: noise grid shape mismatch");
  }
  Grid out = image;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] = clamp01((out.data[i] + additive_noise.data[i]) *
                          contrast_factor);
  }
  return out;
}

Sample augment_weak(const Sample& s, Rng& rng) {
  return rng.bernoulli(0.5) ? hflip(s) : s;
}

Sample strong_from_weak(const Sample& weak, Rng& rng) {
  Grid noise(weak.image.shape);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise.data[i] = rng.normal(0.0, 0.05);
  }
  const double factor = rng.uniform(0.7, 1.3);
  Sample out = weak;
  out.image = intensity_map(weak.image, noise, factor);
  return out;
}

Sample augment_strong(const Sample& s, Rng& rng) {
  const Sample weak = augment_weak(s, rng);
  return strong_from_weak(weak, rng);
}

Dataset make_dataset(const SceneSpec& spec, std::size_t train_count,
                     std::size_t eval_count, double default_fraction) {
  if (train_count < 2) {
    throw ValidationError("dataset needs at least 2 training samples");
  }
  if (eval_count < 1) {
    throw ValidationError("dataset needs at least 1 eval sample");
  }
  spec.validate();
  Dataset ds;
  ds.scene = spec;
  ds.train.reserve(train_count);
  for (std::size_t i = 0; i < train_count; ++i) {
    ds.train.push_back(generate_one(spec, i));
  }
  ds.eval_samples.reserve(eval_count);
  for (std::size_t i = 0; i < eval_count; ++i) {
    ds.eval_samples.push_back(generate_one(spec, train_count + i));
  }
  const SplitIndices idx =
      split_indices({train_count, default_fraction, spec.seed});
  ds.default_labeled.assign(train_count, 0);
  for (const std::size_t i : idx.labeled) {
    ds.default_labeled[i] = 1;
  }
  return ds;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");

  json samples = json::array();
  auto dump_one = [&](const Sample& s, const char* role, bool labeled) {
    const std::string stem = sample_stem(role, s.id);
    const std::string image_rel = "images/" + stem + ".pgm";
    const std::string mask_rel = "masks/" + stem + ".pgm";
    write_pgm(dir / image_rel, s.image);
    write_label_pgm(dir / mask_rel, s.truth);
    samples.push_back({{"id", s.id},
                       {"role", role},
                       {"labeled", labeled},
                       {"image", image_rel},
                       {"mask", mask_rel}});
  };
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    dump_one(ds.train[i], "train", ds.default_labeled[i] != 0);
  }
  for (const auto& s : ds.eval_samples) {
    dump_one(s, "eval", false);
  }

  const json manifest = {{"scene", ds.scene.to_json()},
                         {"class_count", ds.scene.class_count()},
                         {"samples", samples}};
  std::ofstream out(dir / "manifest.json");
  if (!out) {
    throw IoError("cannot write manifest: " + (dir / "manifest.json").string());
  }
  out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw IoError("cannot open manifest: " + manifest_path.string());
  }
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + manifest_path.string() + ": " +
                  e.what());
  }

  Dataset ds;
  ds.scene = SceneSpec::from_json(manifest.at("scene"));
  const int class_count = static_cast<int>(ds.scene.class_count());
  for (const auto& sj : manifest.at("samples")) {
    Sample s;
    s.id = sj.at("id").get<std::size_t>();
    s.image = read_pgm(dir / sj.at("image").get<std::string>());
    s.truth = read_label_pgm(dir / sj.at("mask").get<std::string>());
    for (const int lbl : s.truth.labels) {
      if (lbl >= class_count) {
        throw IoError("mask label " + std::to_string(lbl) +
                      " exceeds class count in sample " + std::to_string(s.id));
      }
    }
    const std::string role = sj.at("role").get<std::string>();
    if (role == "train") {
      ds.train.push_back(std::move(s));
      ds.default_labeled.push_back(sj.at("labeled").get<bool>() ? 1 : 0);
    } else if (role == "eval") {
      ds.eval_samples.push_back(std::move(s));
    } else {
      throw IoError("unknown sample role: " + role);
    }
  }
  if (ds.train.empty()) {
    throw IoError("dataset has no training samples: " + dir.string());
  }
  log_debug("loaded dataset with " + std::to_string(ds.train.size()) +
            " train / " + std::to_string(ds.eval_samples.size()) +
            " eval samples");
  return ds;
}

}  // namespace encore
