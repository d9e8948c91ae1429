#include "core/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/rng.hpp"
#include "core/stats.hpp"

namespace tg {

namespace {

constexpr std::uint64_t kSplitATag = 0xA5;
constexpr std::uint64_t kSplitBTag = 0xB5;
constexpr std::uint64_t kTrainATag = 0xA7;
constexpr std::uint64_t kTrainBTag = 0xB7;

/// Seeded train/test split: shuffle indices, first train_count train, the
/// rest test (ascending for stable reporting).
std::pair<std::vector<int>, std::vector<int>> split_indices(std::size_t n,
                                                            int train_count,
                                                            Rng rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = rng.index(i + 1);
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> train(idx.begin(), idx.begin() + train_count);
  std::vector<int> test(idx.begin() + train_count, idx.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

ClassifierModel train_on(const ConditionSet& set, const std::vector<int>& train,
                         TrainConfig cfg, std::uint64_t seed) {
  std::vector<LabeledImagePair> pairs;
  pairs.reserve(train.size());
  for (int i : train) pairs.push_back({set.images[i], set.masks[i]});
  cfg.seed = seed;
  return train_classifier(pairs, cfg);
}

}  // namespace

MeasurementResult measure_image(const RgbImage& image,
                                const ClassifierModel& model,
                                double pad_height_mm,
                                const MeasureConfig& config) {
  BinaryMask mask = classify_image(image, model);
  return measure_diameter(mask, pad_height_mm, config);
}

LuminosityResult run_luminosity(const ConditionSet& condition_a,
                                const ConditionSet& condition_b,
                                const LuminosityConfig& config) {
  if (config.train_count < 1)
    fail(ErrorCode::InvalidArgument, "train_count must be >= 1");
  for (const ConditionSet* set : {&condition_a, &condition_b}) {
    if (set->images.size() != set->masks.size() ||
        set->images.size() != set->pad_height_mm.size())
      fail(ErrorCode::InvalidArgument,
           "condition set fields have mismatched lengths");
    if (set->size() <= static_cast<std::size_t>(config.train_count))
      fail(ErrorCode::InsufficientTrainingData,
           "condition needs more scenes than train_count");
  }

  Rng base(config.seed);
  auto [train_a, test_a] =
      split_indices(condition_a.size(), config.train_count, base.fork(kSplitATag));
  auto [train_b, test_b] =
      split_indices(condition_b.size(), config.train_count, base.fork(kSplitBTag));

  ClassifierModel model_a =
      train_on(condition_a, train_a, config.train, base.fork(kTrainATag).seed());
  ClassifierModel model_b =
      train_on(condition_b, train_b, config.train, base.fork(kTrainBTag).seed());

  LuminosityResult out;
  auto run_side = [&](const ConditionSet& set, const std::vector<int>& test,
                      const ClassifierModel& matched,
                      const ClassifierModel& crossed, LuminosityRow& row,
                      std::vector<int>& indices, std::vector<double>& diffs) {
    row.tests = static_cast<int>(test.size());
    for (int i : test) {
      try {
        MeasurementResult m =
            measure_image(set.images[i], matched, set.pad_height_mm[i],
                          config.measure);
        MeasurementResult c =
            measure_image(set.images[i], crossed, set.pad_height_mm[i],
                          config.measure);
        diffs.push_back(std::fabs(m.diameter_mm - c.diameter_mm));
        indices.push_back(i);
      } catch (const Error&) {
        ++row.failures;
      }
    }
    row.pairs = static_cast<int>(diffs.size());
    if (!diffs.empty()) {
      ConditionDiff d = cross_condition_compare(
          diffs, std::vector<double>(diffs.size(), 0.0));
      row.mean_abs_diff_mm = d.mean_abs;
      row.std_abs_diff_mm = d.std_abs;
    }
  };

  run_side(condition_a, test_a, model_a, model_b, out.row_a, out.test_indices_a,
           out.diffs_a);
  run_side(condition_b, test_b, model_b, model_a, out.row_b, out.test_indices_b,
           out.diffs_b);
  return out;
}

LuminosityResult run_luminosity_experiment(
    const std::vector<SceneSpec>& specs_a, const std::vector<SceneSpec>& specs_b,
    const LuminosityConfig& config) {
  auto render = [](const std::vector<SceneSpec>& specs) {
    ConditionSet set;
    for (const SceneSpec& spec : specs) {
      Scene scene = synth_scene(spec);
      set.images.push_back(std::move(scene.image));
      set.masks.push_back(std::move(scene.mask));
      set.pad_height_mm.push_back(spec.pad_height_mm);
    }
    return set;
  };
  return run_luminosity(render(specs_a), render(specs_b), config);
}

}  // namespace tg
