#pragma once

#include <cstdint>
#include <vector>

#include "core/geometry.hpp"
#include "core/segmentation.hpp"
#include "core/synth.hpp"

namespace tg {

/// One luminosity condition's scene set: images with their ideal training
/// masks and per-scene physical pad heights.
struct ConditionSet {
  std::vector<RgbImage> images;
  std::vector<BinaryMask> masks;
  std::vector<double> pad_height_mm;

  std::size_t size() const { return images.size(); }
};

struct LuminosityConfig {
  int train_count = 4;
  TrainConfig train;
  MeasureConfig measure;
  std::uint64_t seed = 0;
};

/// One Table-2-style row: test images of one condition, measured under the
/// matched-condition model vs the other condition's model.
struct LuminosityRow {
  int tests = 0;      // test images in this condition
  int pairs = 0;      // images where both measurements succeeded
  int failures = 0;   // tests - pairs
  double mean_abs_diff_mm = 0.0;
  double std_abs_diff_mm = 0.0;
};

struct LuminosityResult {
  LuminosityRow row_a;
  LuminosityRow row_b;
  std::vector<int> test_indices_a;  // original index of each successful pair,
  std::vector<int> test_indices_b;  // ascending, parallel to diffs
  std::vector<double> diffs_a;      // |matched - crossed| per successful pair
  std::vector<double> diffs_b;
};

/// Full crossed-luminosity protocol on pre-rendered scene sets: randomly
/// split each condition into train/test, fit one classifier per condition,
/// measure every test image under both classifiers, and report the
/// per-condition statistics of the matched-vs-crossed differences.
LuminosityResult run_luminosity(const ConditionSet& condition_a,
                                const ConditionSet& condition_b,
                                const LuminosityConfig& config);

/// Convenience wrapper that renders the scenes first.
LuminosityResult run_luminosity_experiment(
    const std::vector<SceneSpec>& specs_a, const std::vector<SceneSpec>& specs_b,
    const LuminosityConfig& config);

/// classify_image followed by measure_diameter.
MeasurementResult measure_image(const RgbImage& image,
                                const ClassifierModel& model,
                                double pad_height_mm,
                                const MeasureConfig& config);

}  // namespace tg
