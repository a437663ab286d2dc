#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "encore/grid.hpp"
#include "encore/rng.hpp"

namespace encore {

enum class ShapeKind { disk, rectangle, ring };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& s);

// One foreground class: what to draw, how bright, how noisy. Higher sigma
// makes the class empirically harder, which is the whole point of the
// synthetic task: per-class confidence must end up heterogeneous.
struct ClassSpec {
  ShapeKind shape = ShapeKind::disk;
  double intensity = 0.5;
  double noise_sigma = 0.0;
};

struct SceneSpec {
  std::size_t height = 64;
  std::size_t width = 64;
  double background_intensity = 0.2;
  double background_sigma = 0.05;
  std::vector<ClassSpec> foreground;  // classes 1..C-1; class 0 is background
  std::uint64_t seed = 1;

  std::size_t class_count() const { return foreground.size() + 1; }
  void validate() const;  // throws ValidationError

  nlohmann::json to_json() const;
  static SceneSpec from_json(const nlohmann::json& j);

  // The scene used by the bundled benchmark: 4 classes with noise sigmas
  // spanning 0.02..0.30.
  static SceneSpec benchmark_default();
};

struct Sample {
  Grid image;       // (1,H,W), values in [0,1]
  LabelMask truth;  // keep all-true
  std::size_t id = 0;
};

struct SplitSpec {
  std::size_t total = 0;
  double labeled_fraction = 0.5;  // one of 1/2, 1/4, 1/8, 1/16, 1/32
  std::uint64_t seed = 1;

  std::size_t labeled_count() const;
  void validate() const;
};

// Deterministic in (spec.seed, count); sample i depends only on (seed, i),
// so prefixes are stable when count grows.
std::vector<Sample> generate(const SceneSpec& spec, std::size_t count);

struct SplitIndices {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> unlabeled;
};

SplitIndices split_indices(const SplitSpec& spec);
std::pair<std::vector<Sample>, std::vector<Sample>> split(
    const std::vector<Sample>& samples, const SplitSpec& spec);

// Deterministic augmentation cores. The rng-driven wrappers below compose
// them; tests drive the cores directly.
Sample hflip(const Sample& s);
Grid intensity_map(const Grid& image, const Grid& additive_noise,
                   double contrast_factor);  // clamped to [0,1]

// Weak: horizontal flip with p=0.5, applied to image and truth together.
Sample augment_weak(const Sample& s, Rng& rng);
// Strong: weak flip, then additive Gaussian noise (sigma 0.05) and a
// multiplicative contrast factor in [0.7, 1.3]; truth untouched.
Sample augment_strong(const Sample& s, Rng& rng);
// The intensity part of the strong augmentation, for callers that already
// hold the weakly augmented sample and need pixel alignment with it.
Sample strong_from_weak(const Sample& weak, Rng& rng);

// On-disk dataset: train split plus a held-out eval split, PGM pairs and a
// JSON manifest.
struct Dataset {
  SceneSpec scene;
  std::vector<Sample> train;
  std::vector<Sample> eval_samples;
  std::vector<std::uint8_t> default_labeled;  // manifest flag per train sample
};

Dataset make_dataset(const SceneSpec& spec, std::size_t train_count,
                     std::size_t eval_count, double default_fraction);
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace encore
