#include <string>

#include "core/error.hpp"
#include "core/model_json.hpp"
#include "core/segmentation.hpp"
#include "core/synth.hpp"
#include "doctest.h"

using tg::ClassifierModel;

namespace {

ClassifierModel hand_model() {
  ClassifierModel model;
  tg::GaussianComponent a, b;
  a.weight = 0.5;
  a.mean = {170.25, 37.5};
  a.cov = {2.0, 0.109375, 1.5};  // xy exactly representable and unique in
                                 // the file, so tests can tamper with it
  b.weight = 0.5;
  b.mean = {150.0, 42.0};
  b.cov = {3.0, -0.5, 2.5};
  model.pads.components = {a, b};

  tg::GaussianComponent bg;
  bg.weight = 1.0;
  bg.mean = {-12.125, 8.0};
  bg.cov = {40.0, 4.0, 30.0};
  model.background.components = {bg};

  model.image_count = 9;
  model.seed = 1234567890123456789ull;
  model.pads_info.points_total = 400000;
  model.pads_info.points_used = 200000;
  model.pads_info.fit.converged = true;
  model.pads_info.fit.iterations = 42;
  model.pads_info.fit.final_log_likelihood = -123456.78125;
  model.pads_info.fit.reinitializations = 1;
  model.background_info.points_total = 500;
  model.background_info.points_used = 500;
  model.background_info.fit.converged = true;
  model.background_info.fit.iterations = 7;
  model.background_info.fit.final_log_likelihood = -99.03125;
  return model;
}

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

void check_code(const std::string& text, tg::ErrorCode want) {
  try {
    tg::classifier_from_json(text);
    FAIL("expected a parse/validation failure");
  } catch (const tg::Error& e) {
    CHECK(e.code() == want);
  }
}

}  // namespace

TEST_CASE("serialize-parse-serialize is byte identical") {
  const ClassifierModel model = hand_model();
  const std::string once = tg::classifier_to_json(model);
  const ClassifierModel parsed = tg::classifier_from_json(once);
  const std::string twice = tg::classifier_to_json(parsed);
  CHECK(once == twice);
}

TEST_CASE("a trained classifier round-trips byte-identically") {
  std::vector<tg::LabeledImagePair> pairs;
  for (int i = 0; i < 3; ++i) {
    tg::SceneSpec spec;
    spec.seed = 9100 + static_cast<std::uint64_t>(i);
    tg::Scene scene = tg::synth_scene(spec);
    pairs.push_back({std::move(scene.image), std::move(scene.mask)});
  }
  tg::TrainConfig config;
  config.cap_per_class = 10000;
  const ClassifierModel trained = tg::train_classifier(pairs, config);
  const std::string once = tg::classifier_to_json(trained);
  const std::string twice =
      tg::classifier_to_json(tg::classifier_from_json(once));
  CHECK(once == twice);
}

TEST_CASE("every field survives the round trip exactly") {
  const ClassifierModel model = hand_model();
  const ClassifierModel parsed =
      tg::classifier_from_json(tg::classifier_to_json(model));

  CHECK(parsed.colorspace == model.colorspace);
  CHECK(parsed.image_count == 9);
  CHECK(parsed.seed == 1234567890123456789ull);
  CHECK(parsed.pads_info.points_total == 400000);
  CHECK(parsed.pads_info.points_used == 200000);
  CHECK(parsed.pads_info.fit.converged);
  CHECK(parsed.pads_info.fit.iterations == 42);
  CHECK(parsed.pads_info.fit.final_log_likelihood == -123456.78125);
  CHECK(parsed.pads_info.fit.reinitializations == 1);
  CHECK(parsed.background_info.fit.iterations == 7);

  REQUIRE(parsed.pads.mode_count() == 2);
  REQUIRE(parsed.background.mode_count() == 1);
  const auto& a = parsed.pads.components[0];
  CHECK(a.weight == 0.5);
  CHECK(a.mean.x == 170.25);
  CHECK(a.mean.y == 37.5);
  CHECK(a.cov.xx == 2.0);
  CHECK(a.cov.xy == 0.109375);
  CHECK(a.cov.yy == 1.5);
  const auto& bg = parsed.background.components[0];
  CHECK(bg.weight == 1.0);
  CHECK(bg.cov.xy == 4.0);
}

TEST_CASE("the wrong format tag is rejected") {
  const std::string text = tg::classifier_to_json(hand_model());
  check_code(replace_once(text, "trunkgauge-model", "some-other-model"),
             tg::ErrorCode::Parse);
}

TEST_CASE("an unsupported version is rejected") {
  const std::string text = tg::classifier_to_json(hand_model());
  check_code(replace_once(text, "\"version\": 1", "\"version\": 99"),
             tg::ErrorCode::Parse);
}

TEST_CASE("tampered weights no longer sum to one") {
  const std::string text = tg::classifier_to_json(hand_model());
  check_code(replace_once(text, "\"weight\": 0.5", "\"weight\": 0.9"),
             tg::ErrorCode::InvalidArgument);
}

TEST_CASE("an asymmetric covariance is rejected") {
  const std::string text = tg::classifier_to_json(hand_model());
  // cov serializes as the full 2x2 row-major matrix; breaking the first
  // off-diagonal entry must fail the symmetry check.
  check_code(replace_once(text, "0.109375", "0.109376"), tg::ErrorCode::Parse);
}

TEST_CASE("a mode-count mismatch is rejected") {
  const std::string text = tg::classifier_to_json(hand_model());
  check_code(replace_once(text, "\"modes\": 2", "\"modes\": 3"),
             tg::ErrorCode::Parse);
}

TEST_CASE("garbage input is a parse error, not a crash") {
  check_code("", tg::ErrorCode::Parse);
  check_code("{\"format\": \"trunkgauge-model\"", tg::ErrorCode::Parse);
  check_code("[1, 2, 3]", tg::ErrorCode::Parse);
  check_code("{}", tg::ErrorCode::Parse);
}
