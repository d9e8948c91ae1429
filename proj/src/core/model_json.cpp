#include "core/model_json.hpp"

#include <nlohmann/json.hpp>

namespace tg {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "trunkgauge-model";
constexpr int kFormatVersion = 1;

json class_to_json(const char* label, const GmmModel& model,
                   const ClassTrainInfo& info) {
  json components = json::array();
  for (const GaussianComponent& c : model.components) {
    components.push_back({
        {"weight", c.weight},
        {"mean", {c.mean.x, c.mean.y}},
        {"cov", {c.cov.xx, c.cov.xy, c.cov.xy, c.cov.yy}},
    });
  }
  return {
      {"label", label},
      {"modes", model.mode_count()},
      {"components", std::move(components)},
      {"points_total", info.points_total},
      {"points_used", info.points_used},
      {"fit",
       {
           {"converged", info.fit.converged},
           {"iterations", info.fit.iterations},
           {"final_log_likelihood", info.fit.final_log_likelihood},
           {"reinitializations", info.fit.reinitializations},
       }},
  };
}

void class_from_json(const json& j, const char* label, GmmModel& model,
                     ClassTrainInfo& info) {
  if (j.at("label").get<std::string>() != label)
    fail(ErrorCode::Parse, std::string("model class out of order, expected '") +
                               label + "'");
  int modes = j.at("modes").get<int>();
  model.components.clear();
  for (const json& cj : j.at("components")) {
    GaussianComponent c;
    c.weight = cj.at("weight").get<double>();
    const json& mean = cj.at("mean");
    const json& cov = cj.at("cov");
    if (mean.size() != 2 || cov.size() != 4)
      fail(ErrorCode::Parse, "component mean/cov have wrong arity");
    c.mean = {mean[0].get<double>(), mean[1].get<double>()};
    if (cov[1].get<double>() != cov[2].get<double>())
      fail(ErrorCode::Parse, "covariance matrix is not symmetric");
    c.cov = {cov[0].get<double>(), cov[1].get<double>(), cov[3].get<double>()};
    model.components.push_back(c);
  }
  if (model.mode_count() != modes)
    fail(ErrorCode::Parse, "mode count does not match component list");

  const json& fit = j.at("fit");
  info.points_total = j.at("points_total").get<std::size_t>();
  info.points_used = j.at("points_used").get<std::size_t>();
  info.fit.converged = fit.at("converged").get<bool>();
  info.fit.iterations = fit.at("iterations").get<int>();
  info.fit.final_log_likelihood = fit.at("final_log_likelihood").get<double>();
  info.fit.reinitializations = fit.at("reinitializations").get<int>();
}

}  // namespace

std::string classifier_to_json(const ClassifierModel& model) {
  model.validate();
  json j = {
      {"format", kFormatTag},
      {"version", kFormatVersion},
      {"colorspace", model.colorspace},
      {"seed", model.seed},
      {"training_images", model.image_count},
      {"classes",
       {class_to_json("pads", model.pads, model.pads_info),
        class_to_json("background", model.background, model.background_info)}},
  };
  return j.dump(2) + "\n";
}

ClassifierModel classifier_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatTag)
      fail(ErrorCode::Parse, "not a trunkgauge model file");
    if (j.at("version").get<int>() != kFormatVersion)
      fail(ErrorCode::Parse, "unsupported model file version");

    ClassifierModel model;
    model.colorspace = j.at("colorspace").get<std::string>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.image_count = j.at("training_images").get<int>();

    const json& classes = j.at("classes");
    if (classes.size() != 2)
      fail(ErrorCode::Parse, "model file must hold exactly 2 classes");
    class_from_json(classes[0], "pads", model.pads, model.pads_info);
    class_from_json(classes[1], "background", model.background,
                    model.background_info);

    model.validate();
    return model;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::Parse, std::string("model file: ") + e.what());
  }
}

}  // namespace tg
