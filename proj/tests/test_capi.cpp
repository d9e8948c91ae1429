#include <cmath>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "core/color_space.hpp"
#include "core/stats.hpp"
#include "core/synth.hpp"
#include "doctest.h"
#include "trunkgauge/trunkgauge.h"

namespace {

struct SceneHandles {
  tg_image* image = nullptr;
  tg_mask* mask = nullptr;
  tg_scene_truth truth{};

  SceneHandles() = default;
  SceneHandles(SceneHandles&& other) noexcept
      : image(std::exchange(other.image, nullptr)),
        mask(std::exchange(other.mask, nullptr)),
        truth(other.truth) {}
  SceneHandles& operator=(SceneHandles&& other) noexcept {
    if (this != &other) {
      tg_image_destroy(image);
      tg_mask_destroy(mask);
      image = std::exchange(other.image, nullptr);
      mask = std::exchange(other.mask, nullptr);
      truth = other.truth;
    }
    return *this;
  }
  SceneHandles(const SceneHandles&) = delete;
  SceneHandles& operator=(const SceneHandles&) = delete;
  ~SceneHandles() {
    tg_image_destroy(image);
    tg_mask_destroy(mask);
  }
};

SceneHandles make_scene(std::uint64_t seed, double jitter = 0.0,
                        double tilt = 0.0, double brightness = 1.0) {
  tg_scene_spec spec;
  tg_scene_spec_init(&spec);
  spec.seed = seed;
  spec.edge_jitter_px = jitter;
  spec.tilt_deg = tilt;
  spec.brightness = brightness;
  SceneHandles out;
  REQUIRE(tg_synth_scene(&spec, &out.image, &out.mask, &out.truth) == TG_OK);
  return out;
}

struct ClassifierHandle {
  tg_classifier* ptr = nullptr;
  ~ClassifierHandle() { tg_classifier_destroy(ptr); }
};

void train_small(ClassifierHandle& out, int scenes = 4,
                 std::uint64_t seed0 = 46000) {
  std::vector<SceneHandles> corpus;
  corpus.reserve(static_cast<std::size_t>(scenes));
  std::vector<const tg_image*> images;
  std::vector<const tg_mask*> masks;
  for (int i = 0; i < scenes; ++i) {
    corpus.push_back(make_scene(seed0 + static_cast<std::uint64_t>(i)));
    images.push_back(corpus.back().image);
    masks.push_back(corpus.back().mask);
  }
  tg_train_config config;
  tg_train_config_init(&config);
  config.cap_per_class = 15000;
  REQUIRE(tg_train(images.data(), masks.data(), scenes, &config, &out.ptr) ==
          TG_OK);
}

}  // namespace

TEST_CASE("version and status names are stable strings") {
  CHECK(std::string(tg_version()) == "1.0.0");
  CHECK(std::string(tg_status_name(TG_OK)) == "ok");
  CHECK(std::string(tg_status_name(TG_ERROR_INVALID_ARGUMENT)) ==
        "invalid_argument");
  CHECK(std::string(tg_status_name(TG_ERROR_PADS_NOT_FOUND)) ==
        "pads_not_found");
  CHECK(std::string(tg_status_name(TG_ERROR_UNKNOWN)) == "unknown");
  CHECK(tg_last_error() != nullptr);
}

TEST_CASE("image handles carry dimensions and pixels") {
  std::vector<std::uint8_t> rgb(3 * 4 * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i)
    rgb[i] = static_cast<std::uint8_t>(i * 7);
  tg_image* image = nullptr;
  REQUIRE(tg_image_create(4, 3, rgb.data(), &image) == TG_OK);
  CHECK(tg_image_width(image) == 4);
  CHECK(tg_image_height(image) == 3);
  CHECK(std::memcmp(tg_image_pixels_const(image), rgb.data(), rgb.size()) == 0);
  tg_image_pixels(image)[0] = 201;
  CHECK(tg_image_pixels_const(image)[0] == 201);
  tg_image_destroy(image);

  tg_image* blank = nullptr;
  REQUIRE(tg_image_create(2, 2, nullptr, &blank) == TG_OK);
  const std::uint8_t* p = tg_image_pixels_const(blank);
  for (int i = 0; i < 12; ++i) CHECK(p[i] == 0);
  tg_image_destroy(blank);
}

TEST_CASE("mask handles normalize any nonzero byte to pads") {
  const std::uint8_t labels[] = {0, 1, 255, 0, 128, 0};
  tg_mask* mask = nullptr;
  REQUIRE(tg_mask_create(3, 2, labels, &mask) == TG_OK);
  const std::uint8_t* p = tg_mask_pixels_const(mask);
  CHECK(p[0] == 0);
  CHECK(p[1] == 255);
  CHECK(p[2] == 255);
  CHECK(p[3] == 0);
  CHECK(p[4] == 255);
  CHECK(p[5] == 0);
  tg_mask_destroy(mask);
}

TEST_CASE("NULL and bad arguments come back as TG_ERROR_INVALID_ARGUMENT") {
  CHECK(tg_image_create(4, 3, nullptr, nullptr) == TG_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(tg_last_error()) > 0);
  tg_image* image = nullptr;
  CHECK(tg_image_create(0, 3, nullptr, &image) == TG_ERROR_INVALID_ARGUMENT);
  CHECK(tg_image_to_uv(nullptr, nullptr) == TG_ERROR_INVALID_ARGUMENT);
  CHECK(tg_measure_mask(nullptr, 20.0, nullptr, nullptr) ==
        TG_ERROR_INVALID_ARGUMENT);
  CHECK(tg_classifier_from_json(nullptr, nullptr) ==
        TG_ERROR_INVALID_ARGUMENT);
  CHECK(tg_synth_scene(nullptr, nullptr, nullptr, nullptr) ==
        TG_ERROR_INVALID_ARGUMENT);
  CHECK(tg_compute_error_stats(nullptr, nullptr, 3, nullptr) ==
        TG_ERROR_INVALID_ARGUMENT);

  // Destroy functions must accept NULL.
  tg_image_destroy(nullptr);
  tg_mask_destroy(nullptr);
  tg_classifier_destroy(nullptr);
  tg_string_destroy(nullptr);
}

TEST_CASE("tg_srgb_to_uv matches the core color transform") {
  double u = -1.0, v = -1.0;
  tg_srgb_to_uv(255, 255, 255, &u, &v);
  CHECK(std::fabs(u) < 1e-6);
  CHECK(std::fabs(v) < 1e-6);

  tg_srgb_to_uv(206, 38, 46, &u, &v);
  const tg::UvPoint want = tg::srgb_to_uv({206, 38, 46});
  CHECK(u == want.u);
  CHECK(v == want.v);
}

TEST_CASE("tg_image_to_uv fills row-major u,v pairs") {
  std::vector<std::uint8_t> rgb = {206, 38, 46, 255, 255, 255};
  tg_image* image = nullptr;
  REQUIRE(tg_image_create(2, 1, rgb.data(), &image) == TG_OK);
  double uv[4] = {-1, -1, -1, -1};
  REQUIRE(tg_image_to_uv(image, uv) == TG_OK);
  const tg::UvPoint red = tg::srgb_to_uv({206, 38, 46});
  CHECK(uv[0] == red.u);
  CHECK(uv[1] == red.v);
  CHECK(std::fabs(uv[2]) < 1e-6);
  CHECK(std::fabs(uv[3]) < 1e-6);
  tg_image_destroy(image);
}

TEST_CASE("tg_measure_mask on a noiseless scene is exact") {
  SceneHandles scene = make_scene(501);
  tg_measure_config config;
  tg_measure_config_init(&config);
  tg_measurement m{};
  REQUIRE(tg_measure_mask(scene.mask, scene.truth.pad_height_mm, &config,
                          &m) == TG_OK);
  CHECK(m.gap_px == scene.truth.gap_px);
  CHECK(m.pad_height_px == scene.truth.pad_height_px);
  CHECK(m.diameter_mm == scene.truth.diameter_mm);
  CHECK(m.samples_used > 0);
  CHECK(m.stations_reduced == 0);
}

TEST_CASE("a mask with one bar reports TG_ERROR_PADS_NOT_FOUND") {
  std::vector<std::uint8_t> labels(200 * 200, 0);
  for (int y = 40; y < 140; ++y)
    for (int x = 90; x < 100; ++x)
      labels[static_cast<std::size_t>(y) * 200 + x] = 255;
  tg_mask* mask = nullptr;
  REQUIRE(tg_mask_create(200, 200, labels.data(), &mask) == TG_OK);
  tg_measure_config config;
  tg_measure_config_init(&config);
  tg_measurement m{};
  CHECK(tg_measure_mask(mask, 20.0, &config, &m) == TG_ERROR_PADS_NOT_FOUND);
  CHECK(std::strlen(tg_last_error()) > 0);
  tg_mask_destroy(mask);
}

TEST_CASE("train, classify and measure through the C API") {
  ClassifierHandle classifier;
  train_small(classifier);

  tg_fit_info pads_info{}, bg_info{};
  REQUIRE(tg_classifier_fit_info(classifier.ptr, 0, &pads_info) == TG_OK);
  REQUIRE(tg_classifier_fit_info(classifier.ptr, 1, &bg_info) == TG_OK);
  CHECK(pads_info.converged == 1);
  CHECK(bg_info.converged == 1);
  CHECK(pads_info.points_used <= 15000);
  CHECK(pads_info.points_total > pads_info.points_used);
  CHECK(tg_classifier_fit_info(classifier.ptr, 2, &pads_info) ==
        TG_ERROR_INVALID_ARGUMENT);

  // The pads' own color must classify as pads, sky as background.
  const tg::UvPoint red = tg::srgb_to_uv({206, 38, 46});
  const tg::UvPoint sky = tg::srgb_to_uv({168, 196, 220});
  int32_t label = -1;
  REQUIRE(tg_classify_point(classifier.ptr, red.u, red.v, &label) == TG_OK);
  CHECK(label == 1);
  REQUIRE(tg_classify_point(classifier.ptr, sky.u, sky.v, &label) == TG_OK);
  CHECK(label == 0);

  // Measure a held-out scene end to end.
  SceneHandles scene = make_scene(777, 1.0, 2.0);
  tg_measure_config measure;
  tg_measure_config_init(&measure);
  tg_measurement m{};
  REQUIRE(tg_measure_image(classifier.ptr, scene.image,
                           scene.truth.pad_height_mm, &measure, &m) == TG_OK);
  CHECK(std::fabs(m.diameter_mm - scene.truth.diameter_mm) < 0.2);

  // And the split version must agree exactly.
  tg_mask* predicted = nullptr;
  REQUIRE(tg_classify_image(classifier.ptr, scene.image, &predicted) == TG_OK);
  tg_measurement m2{};
  REQUIRE(tg_measure_mask(predicted, scene.truth.pad_height_mm, &measure,
                          &m2) == TG_OK);
  CHECK(m2.diameter_mm == m.diameter_mm);
  CHECK(m2.samples_used == m.samples_used);
  tg_mask_destroy(predicted);
}

TEST_CASE("classifier JSON round-trips through the C API") {
  ClassifierHandle classifier;
  train_small(classifier, 3, 47000);

  char* json1 = nullptr;
  REQUIRE(tg_classifier_to_json(classifier.ptr, &json1) == TG_OK);
  REQUIRE(json1 != nullptr);

  ClassifierHandle loaded;
  REQUIRE(tg_classifier_from_json(json1, &loaded.ptr) == TG_OK);
  char* json2 = nullptr;
  REQUIRE(tg_classifier_to_json(loaded.ptr, &json2) == TG_OK);
  CHECK(std::string(json1) == std::string(json2));
  tg_string_destroy(json1);
  tg_string_destroy(json2);

  ClassifierHandle bad;
  CHECK(tg_classifier_from_json("not json at all", &bad.ptr) ==
        TG_ERROR_PARSE);
}

TEST_CASE("synthetic scenes via the C API match the core renderer") {
  tg_scene_spec spec;
  tg_scene_spec_init(&spec);
  spec.seed = 881;
  spec.tilt_deg = 3.0;
  spec.edge_jitter_px = 1.5;

  tg_image* image = nullptr;
  tg_mask* mask = nullptr;
  tg_scene_truth truth{};
  REQUIRE(tg_synth_scene(&spec, &image, &mask, &truth) == TG_OK);

  tg::SceneSpec core_spec;
  core_spec.seed = 881;
  core_spec.tilt_deg = 3.0;
  core_spec.edge_jitter_px = 1.5;
  const tg::Scene core = tg::synth_scene(core_spec);

  CHECK(truth.diameter_mm == core.truth.diameter_mm);
  REQUIRE(tg_image_width(image) == core.image.width());
  const std::uint8_t* pixels = tg_image_pixels_const(image);
  bool same = true;
  for (int y = 0; y < core.image.height() && same; ++y)
    for (int x = 0; x < core.image.width() && same; ++x) {
      const tg::Rgb8 px = core.image.at(x, y);
      const std::size_t o =
          3 * (static_cast<std::size_t>(y) * core.image.width() + x);
      same = pixels[o] == px.r && pixels[o + 1] == px.g && pixels[o + 2] == px.b;
    }
  CHECK(same);
  tg_image_destroy(image);
  tg_mask_destroy(mask);
}

TEST_CASE("evaluation helpers agree with the core statistics") {
  const std::vector<double> measured = {30.1, 29.8, 30.4, 30.0, 31.2};
  const std::vector<double> reference = {30.0, 30.0, 30.0, 30.0, 30.0};

  tg_error_stats stats{};
  REQUIRE(tg_compute_error_stats(measured.data(), reference.data(), 5,
                                 &stats) == TG_OK);
  const tg::ErrorStats core = tg::error_stats(measured, reference);
  CHECK(stats.mean_abs == core.mean_abs);
  CHECK(stats.std_abs == core.std_abs);
  CHECK(stats.max_abs == core.max_abs);
  CHECK(stats.count == 5);

  double frac = -1.0;
  REQUIRE(tg_fraction_below(measured.data(), reference.data(), 5, 0.2,
                            &frac) == TG_OK);
  CHECK(frac == core.fraction_below(0.2));

  // Two-phase histogram: query the bin count, then fill.
  std::vector<double> errors;
  for (std::size_t i = 0; i < measured.size(); ++i)
    errors.push_back(std::fabs(measured[i] - reference[i]));
  int32_t bins_used = -1;
  REQUIRE(tg_error_histogram(errors.data(), 5, 0.2, nullptr, 0, &bins_used) ==
          TG_OK);
  const tg::Histogram core_hist = tg::error_histogram(errors, 0.2);
  REQUIRE(bins_used == static_cast<int32_t>(core_hist.counts.size()));
  std::vector<int64_t> counts(static_cast<std::size_t>(bins_used), -1);
  REQUIRE(tg_error_histogram(errors.data(), 5, 0.2, counts.data(), bins_used,
                             &bins_used) == TG_OK);
  std::int64_t total = 0;
  for (int32_t i = 0; i < bins_used; ++i) {
    CHECK(counts[static_cast<std::size_t>(i)] ==
          core_hist.counts[static_cast<std::size_t>(i)]);
    total += counts[static_cast<std::size_t>(i)];
  }
  CHECK(total == 5);

  // Undersized buffer is an error, not a truncation.
  CHECK(tg_error_histogram(errors.data(), 5, 0.2, counts.data(), 1,
                           &bins_used) == TG_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("the luminosity experiment runs over C-API scene sets") {
  std::vector<SceneHandles> set_a, set_b;
  std::vector<const tg_image*> images_a, images_b;
  std::vector<const tg_mask*> masks_a, masks_b;
  std::vector<double> mm_a, mm_b;
  for (int i = 0; i < 6; ++i) {
    set_a.push_back(make_scene(48000 + static_cast<std::uint64_t>(i), 1.0));
    images_a.push_back(set_a.back().image);
    masks_a.push_back(set_a.back().mask);
    mm_a.push_back(set_a.back().truth.pad_height_mm);
    set_b.push_back(
        make_scene(49000 + static_cast<std::uint64_t>(i), 1.0, 0.0, 0.55));
    images_b.push_back(set_b.back().image);
    masks_b.push_back(set_b.back().mask);
    mm_b.push_back(set_b.back().truth.pad_height_mm);
  }

  tg_train_config train;
  tg_train_config_init(&train);
  train.cap_per_class = 15000;
  tg_measure_config measure;
  tg_measure_config_init(&measure);

  tg_condition_row rows[2] = {};
  double diffs_a[6] = {}, diffs_b[6] = {};
  int32_t n_a = -1, n_b = -1;
  REQUIRE(tg_luminosity_experiment(images_a.data(), masks_a.data(), mm_a.data(),
                                   6, images_b.data(), masks_b.data(),
                                   mm_b.data(), 6, 4, &train, &measure, 12,
                                   rows, diffs_a, &n_a, diffs_b, &n_b) ==
          TG_OK);
  CHECK(rows[0].tests == 2);
  CHECK(rows[1].tests == 2);
  CHECK(rows[0].pairs == n_a);
  CHECK(rows[1].pairs == n_b);
  CHECK(rows[0].pairs + rows[0].failures == rows[0].tests);
  for (int32_t i = 0; i < n_a; ++i) CHECK(diffs_a[i] >= 0.0);
  CHECK(rows[0].mean_abs_diff_mm <= 0.2);
  CHECK(rows[1].mean_abs_diff_mm <= 0.2);

  // Too few scenes for the split must fail cleanly.
  CHECK(tg_luminosity_experiment(images_a.data(), masks_a.data(), mm_a.data(),
                                 4, images_b.data(), masks_b.data(),
                                 mm_b.data(), 6, 4, &train, &measure, 12, rows,
                                 nullptr, nullptr, nullptr, nullptr) ==
        TG_ERROR_INSUFFICIENT_TRAINING_DATA);
}
