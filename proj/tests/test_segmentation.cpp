#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core/color_space.hpp"
#include "core/error.hpp"
#include "core/model_json.hpp"
#include "core/rng.hpp"
#include "core/segmentation.hpp"
#include "core/synth.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using tg::BinaryMask;
using tg::ClassifierModel;
using tg::Label;
using tg::LabeledImagePair;
using tg::RgbImage;
using tg::TrainConfig;
using tg::UvPoint;

namespace {

std::vector<LabeledImagePair> synth_corpus(int count, std::uint64_t seed0,
                                           double tilt_step = 2.0) {
  std::vector<LabeledImagePair> pairs;
  for (int i = 0; i < count; ++i) {
    tg::SceneSpec spec;
    spec.seed = seed0 + static_cast<std::uint64_t>(i);
    spec.tilt_deg = tilt_step * i - tilt_step * count / 2.0;
    spec.edge_jitter_px = 1.0;
    tg::Scene scene = tg::synth_scene(spec);
    pairs.push_back({std::move(scene.image), std::move(scene.mask)});
  }
  return pairs;
}

TrainConfig fast_config() {
  TrainConfig config;
  config.cap_per_class = 20000;  // plenty for tests, much faster
  return config;
}

// Hand-built classifier with well-separated unit-covariance classes.
ClassifierModel separated_model() {
  ClassifierModel model;
  tg::GaussianComponent pads;
  pads.mean = {8.0, 0.0};
  tg::GaussianComponent bg;
  bg.mean = {-8.0, 0.0};
  model.pads.components.push_back(pads);
  model.background.components.push_back(bg);
  return model;
}

}  // namespace

TEST_CASE("build_training_sets routes pixels by mask label") {
  RgbImage image(2, 1);
  image.at(0, 0) = {206, 38, 46};
  image.at(1, 0) = {60, 110, 60};
  BinaryMask mask(2, 1);
  mask.at(0, 0) = Label::Pads;

  std::vector<LabeledImagePair> pairs;
  pairs.push_back({image, mask});
  const auto [pads, background] = tg::build_training_sets(pairs, 1000, 0);
  REQUIRE(pads.size() == 1);
  REQUIRE(background.size() == 1);

  const UvPoint want_pads = tg::srgb_to_uv({206, 38, 46});
  const UvPoint want_bg = tg::srgb_to_uv({60, 110, 60});
  CHECK(pads[0].u == want_pads.u);
  CHECK(pads[0].v == want_pads.v);
  CHECK(background[0].u == want_bg.u);
  CHECK(background[0].v == want_bg.v);
}

TEST_CASE("build_training_sets caps each class deterministically") {
  // 1000 pads pixels + 1000 background pixels in one 2000-px image.
  RgbImage image(2000, 1);
  BinaryMask mask(2000, 1);
  tg::Rng rng(42);
  for (int x = 0; x < 2000; ++x) {
    image.at(x, 0) = {static_cast<std::uint8_t>(rng.index(256)),
                      static_cast<std::uint8_t>(rng.index(256)),
                      static_cast<std::uint8_t>(rng.index(256))};
    if (x < 1000) mask.at(x, 0) = Label::Pads;
  }
  std::vector<LabeledImagePair> pairs;
  pairs.push_back({image, mask});

  const auto [pads_a, bg_a] = tg::build_training_sets(pairs, 100, 7);
  CHECK(pads_a.size() == 100);
  CHECK(bg_a.size() == 100);

  const auto [pads_b, bg_b] = tg::build_training_sets(pairs, 100, 7);
  REQUIRE(pads_b.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(pads_a[i].u == pads_b[i].u);
    CHECK(pads_a[i].v == pads_b[i].v);
  }

  // Under the cap nothing is dropped.
  const auto [pads_c, bg_c] = tg::build_training_sets(pairs, 5000, 7);
  CHECK(pads_c.size() == 1000);
  CHECK(bg_c.size() == 1000);
}

TEST_CASE("training point totals match a direct pixel count") {
  const auto pairs = synth_corpus(8, 100);
  std::size_t pads_pixels = 0, bg_pixels = 0;
  for (const auto& pair : pairs) {
    const std::size_t p = pair.mask.count_pads();
    pads_pixels += p;
    bg_pixels += pair.mask.pixel_count() - p;
  }

  TrainConfig config = fast_config();
  const ClassifierModel model = tg::train_classifier(pairs, config);
  CHECK(model.pads_info.points_total == pads_pixels);
  CHECK(model.background_info.points_total == bg_pixels);
  CHECK(model.pads_info.points_used ==
        std::min(pads_pixels, config.cap_per_class));
  CHECK(model.background_info.points_used ==
        std::min(bg_pixels, config.cap_per_class));
  CHECK(model.image_count == 8);
}

TEST_CASE("training with an all-background corpus is rejected") {
  RgbImage image(8, 8);
  BinaryMask mask(8, 8);  // no pads pixels at all
  std::vector<LabeledImagePair> pairs;
  pairs.push_back({image, mask});
  try {
    tg::train_classifier(pairs, fast_config());
    FAIL("expected InsufficientTrainingData");
  } catch (const tg::Error& e) {
    CHECK(e.code() == tg::ErrorCode::InsufficientTrainingData);
  }
}

TEST_CASE("fitted pads means lie inside the pads point cloud") {
  const auto pairs = synth_corpus(4, 300);
  const auto [pads_points, bg_points] =
      tg::build_training_sets(pairs, 1u << 30, 0);
  double ulo = 1e30, uhi = -1e30, vlo = 1e30, vhi = -1e30;
  for (const auto& p : pads_points) {
    ulo = std::min(ulo, p.u);
    uhi = std::max(uhi, p.u);
    vlo = std::min(vlo, p.v);
    vhi = std::max(vhi, p.v);
  }

  const ClassifierModel model = tg::train_classifier(pairs, fast_config());
  for (const auto& c : model.pads.components) {
    // EM means are convex combinations of training points, so the full-set
    // bounding box contains them even under subsampling.
    CHECK(c.mean.x >= ulo);
    CHECK(c.mean.x <= uhi);
    CHECK(c.mean.y >= vlo);
    CHECK(c.mean.y <= vhi);
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto pairs = synth_corpus(4, 200);
  TrainConfig config = fast_config();
  config.seed = 5;
  const ClassifierModel a = tg::train_classifier(pairs, config);
  const ClassifierModel b = tg::train_classifier(pairs, config);
  CHECK(tg::classifier_to_json(a) == tg::classifier_to_json(b));
}

TEST_CASE("mode-count overrides are honored") {
  const auto pairs = synth_corpus(4, 400);
  TrainConfig config = fast_config();
  config.pads_modes = 1;
  config.background_modes = 4;
  const ClassifierModel model = tg::train_classifier(pairs, config);
  CHECK(model.pads.mode_count() == 1);
  CHECK(model.background.mode_count() == 4);
}

TEST_CASE("classify_pixel: ties go to background") {
  ClassifierModel model = separated_model();
  model.background = model.pads;  // identical densities everywhere
  tg::Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const UvPoint x{rng.uniform(-12.0, 12.0), rng.uniform(-12.0, 12.0)};
    CHECK(tg::classify_pixel(x, model) == Label::Background);
  }
}

TEST_CASE("classify_pixel: class means classify as their own class") {
  const ClassifierModel model = separated_model();
  CHECK(tg::classify_pixel({8.0, 0.0}, model) == Label::Pads);
  CHECK(tg::classify_pixel({-8.0, 0.0}, model) == Label::Background);
}

TEST_CASE("classify_pixel agrees with the linear-domain oracle everywhere") {
  tg::Rng rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    // Random two-class model in the oracle's safe (non-underflow) range.
    ClassifierModel model;
    for (int cls = 0; cls < 2; ++cls) {
      tg::GmmModel& mixture = cls == 0 ? model.pads : model.background;
      const int modes = 1 + static_cast<int>(rng.index(3));
      std::vector<double> w;
      double total = 0.0;
      for (int k = 0; k < modes; ++k) {
        w.push_back(rng.uniform(0.2, 1.0));
        total += w.back();
      }
      for (int k = 0; k < modes; ++k) {
        tg::GaussianComponent c;
        c.weight = w[static_cast<std::size_t>(k)] / total;
        c.mean = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        const double a = rng.uniform(3.0, 20.0);
        const double b = rng.uniform(3.0, 20.0);
        const double rho = rng.uniform(-0.6, 0.6);
        c.cov = {a, rho * std::sqrt(a * b), b};
        mixture.components.push_back(c);
      }
    }
    for (int i = 0; i < 1000; ++i) {
      const UvPoint x{rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0)};
      const int want = oracle::classify_naive(x, model.pads, model.background);
      const Label got = tg::classify_pixel(x, model);
      REQUIRE((got == Label::Pads ? 1 : 0) == want);
    }
  }
}

TEST_CASE("uniform frames classify wholly to the right class") {
  const auto pairs = synth_corpus(8, 500);
  const ClassifierModel model = tg::train_classifier(pairs, fast_config());

  RgbImage red(16, 16);
  for (auto& px : red.pixels()) px = {206, 38, 46};
  const BinaryMask red_mask = tg::classify_image(red, model);
  CHECK(red_mask.count_pads() == red.pixel_count());

  RgbImage leaf(16, 16);
  for (auto& px : leaf.pixels()) px = {60, 110, 60};
  const BinaryMask leaf_mask = tg::classify_image(leaf, model);
  CHECK(leaf_mask.count_pads() == 0);
}

TEST_CASE("classify_image equals a per-pixel classify_pixel loop") {
  const ClassifierModel model = separated_model();
  tg::Rng rng(19);
  RgbImage image(37, 23);
  for (auto& px : image.pixels())
    px = {static_cast<std::uint8_t>(rng.index(256)),
          static_cast<std::uint8_t>(rng.index(256)),
          static_cast<std::uint8_t>(rng.index(256))};

  const BinaryMask mask = tg::classify_image(image, model);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      REQUIRE(mask.at(x, y) ==
              tg::classify_pixel(tg::srgb_to_uv(image.at(x, y)), model));
}

TEST_CASE("binary_opening_3x3 removes speckle and keeps solid regions") {
  BinaryMask mask(32, 32);
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) mask.at(x, y) = Label::Pads;  // 10x10 block
  mask.at(25, 25) = Label::Pads;                               // 1-px speck
  mask.at(28, 3) = Label::Pads;                                // 2x2 speck
  mask.at(29, 3) = Label::Pads;
  mask.at(28, 4) = Label::Pads;
  mask.at(29, 4) = Label::Pads;

  const BinaryMask cleaned = tg::binary_opening_3x3(mask);
  CHECK(cleaned.at(25, 25) == Label::Background);
  CHECK(cleaned.at(28, 3) == Label::Background);
  CHECK(cleaned.at(29, 4) == Label::Background);
  // Opening of a square with a 3x3 element reproduces the square exactly.
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      const bool in_block = x >= 5 && x < 15 && y >= 5 && y < 15;
      REQUIRE(cleaned.at(x, y) ==
              (in_block ? Label::Pads : Label::Background));
    }
}

TEST_CASE("held-out scene accuracy away from label boundaries") {
  const auto pairs = synth_corpus(8, 600);
  const ClassifierModel model = tg::train_classifier(pairs, fast_config());

  tg::SceneSpec spec;
  spec.seed = 9999;
  spec.tilt_deg = 3.0;
  spec.edge_jitter_px = 1.0;
  const tg::Scene scene = tg::synth_scene(spec);
  const BinaryMask predicted = tg::classify_image(scene.image, model);

  // Skip pixels within 2 px (Chebyshev) of a reference-label change; noise
  // makes the exact boundary column ambiguous by construction.
  std::size_t checked = 0, correct = 0;
  const int w = scene.mask.width(), h = scene.mask.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Label ref = scene.mask.at(x, y);
      bool near_boundary = false;
      for (int dy = -2; dy <= 2 && !near_boundary; ++dy)
        for (int dx = -2; dx <= 2 && !near_boundary; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (scene.mask.at(nx, ny) != ref) near_boundary = true;
        }
      if (near_boundary) continue;
      ++checked;
      if (predicted.at(x, y) == ref) ++correct;
    }
  }
  REQUIRE(checked > 100000);
  CHECK(static_cast<double>(correct) >= 0.999 * static_cast<double>(checked));
}
