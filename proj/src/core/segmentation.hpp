#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/gmm.hpp"
#include "core/raster.hpp"

namespace tg {

/// One manually labeled training image: mask marks pad pixels as foreground.
struct LabeledImagePair {
  RgbImage image;
  BinaryMask mask;
};

struct TrainConfig {
  int pads_modes = 2;
  int background_modes = 3;
  std::size_t cap_per_class = 200000;
  double rel_tol = 1e-6;
  int max_iters = 500;
  double reg_eps = 1e-6;
  std::uint64_t seed = 0;
};

/// Per-class training diagnostics carried alongside the fitted mixture.
struct ClassTrainInfo {
  std::size_t points_total = 0;  // labeled pixels across the corpus
  std::size_t points_used = 0;   // after the subsampling cap
  FitReport fit;
};

struct ClassifierModel {
  GmmModel pads;
  GmmModel background;
  std::string colorspace = "cieluv-uv-srgb-d65";
  int image_count = 0;
  std::uint64_t seed = 0;
  ClassTrainInfo pads_info;
  ClassTrainInfo background_info;

  void validate() const;
};

/// Convert every labeled pixel to UV and route it by mask label. Classes
/// above cap_per_class are uniformly subsampled (seeded, deterministic).
std::pair<std::vector<UvPoint>, std::vector<UvPoint>> build_training_sets(
    const std::vector<LabeledImagePair>& pairs, std::size_t cap_per_class,
    std::uint64_t seed);

ClassifierModel train_classifier(const std::vector<LabeledImagePair>& pairs,
                                 const TrainConfig& config);

/// Pads iff the pads mixture's log-density strictly exceeds the background
/// mixture's (equal class priors); ties go to background.
Label classify_pixel(const UvPoint& x, const ClassifierModel& model);

BinaryMask classify_image(const RgbImage& image, const ClassifierModel& model);

/// Optional 3x3 morphological opening (erode then dilate). Not applied by
/// default anywhere in the pipeline; provided for callers that want to
/// knock speckle off a mask before measuring.
BinaryMask binary_opening_3x3(const BinaryMask& mask);

}  // namespace tg
