#include "core/segmentation.hpp"

#include <utility>

#include "core/color_space.hpp"
#include "core/rng.hpp"

namespace tg {

namespace {

constexpr std::uint64_t kPadsSampleTag = 0x5041445353u;  // distinct subsample
constexpr std::uint64_t kBgSampleTag = 0x4247u;          // streams per class
constexpr std::uint64_t kPadsFitTag = 0x50414453464954u;
constexpr std::uint64_t kBgFitTag = 0x4247464954u;

/// Uniform without-replacement reservoir (Algorithm R). Under the cap it
/// consumes no randomness and preserves encounter order.
class Reservoir {
public:
  Reservoir(std::size_t cap, Rng rng) : cap_(cap), rng_(rng) {}

  void add(UvPoint p) {
    if (seen_ < cap_) {
      data_.push_back(p);
    } else {
      std::size_t j = static_cast<std::size_t>(rng_.index(seen_ + 1));
      if (j < cap_) data_[j] = p;
    }
    ++seen_;
  }

  std::size_t seen() const { return seen_; }
  std::vector<UvPoint> take() { return std::move(data_); }

private:
  std::size_t cap_;
  Rng rng_;
  std::vector<UvPoint> data_;
  std::size_t seen_ = 0;
};

}  // namespace

void ClassifierModel::validate() const {
  pads.validate();
  background.validate();
  if (colorspace.empty())
    fail(ErrorCode::InvalidArgument, "classifier model has no colorspace tag");
}

std::pair<std::vector<UvPoint>, std::vector<UvPoint>> build_training_sets(
    const std::vector<LabeledImagePair>& pairs, std::size_t cap_per_class,
    std::uint64_t seed) {
  if (pairs.empty())
    fail(ErrorCode::InsufficientTrainingData, "no training image pairs");
  if (cap_per_class < 1)
    fail(ErrorCode::InvalidArgument, "cap_per_class must be >= 1");

  Rng base(seed);
  Reservoir pads(cap_per_class, base.fork(kPadsSampleTag));
  Reservoir background(cap_per_class, base.fork(kBgSampleTag));

  for (const LabeledImagePair& pair : pairs) {
    if (pair.image.width() != pair.mask.width() ||
        pair.image.height() != pair.mask.height())
      fail(ErrorCode::InvalidArgument,
           "training image and mask dimensions differ");
    const auto& px = pair.image.pixels();
    const auto& lb = pair.mask.labels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      UvPoint p = srgb_to_uv(px[i]);
      if (lb[i] == Label::Pads)
        pads.add(p);
      else
        background.add(p);
    }
  }

  if (pads.seen() == 0)
    fail(ErrorCode::InsufficientTrainingData,
         "training corpus contains no pad pixels");
  if (background.seen() == 0)
    fail(ErrorCode::InsufficientTrainingData,
         "training corpus contains no background pixels");
  return {pads.take(), background.take()};
}

ClassifierModel train_classifier(const std::vector<LabeledImagePair>& pairs,
                                 const TrainConfig& config) {
  if (config.pads_modes < 1 || config.background_modes < 1)
    fail(ErrorCode::InvalidArgument, "mode counts must be >= 1");

  auto [pads_data, bg_data] =
      build_training_sets(pairs, config.cap_per_class, config.seed);

  std::size_t pads_total = 0, bg_total = 0;
  for (const LabeledImagePair& pair : pairs) {
    std::size_t fg = pair.mask.count_pads();
    pads_total += fg;
    bg_total += pair.mask.pixel_count() - fg;
  }

  Rng base(config.seed);
  FitConfig fit;
  fit.rel_tol = config.rel_tol;
  fit.max_iters = config.max_iters;
  fit.reg_eps = config.reg_eps;

  ClassifierModel model;
  model.image_count = static_cast<int>(pairs.size());
  model.seed = config.seed;

  fit.modes = config.pads_modes;
  fit.seed = base.fork(kPadsFitTag).seed();
  auto [pads_model, pads_report] = em_fit(pads_data, fit);
  model.pads = std::move(pads_model);
  model.pads_info = {pads_total, pads_data.size(), std::move(pads_report)};

  fit.modes = config.background_modes;
  fit.seed = base.fork(kBgFitTag).seed();
  auto [bg_model, bg_report] = em_fit(bg_data, fit);
  model.background = std::move(bg_model);
  model.background_info = {bg_total, bg_data.size(), std::move(bg_report)};

  return model;
}

Label classify_pixel(const UvPoint& x, const ClassifierModel& model) {
  double lp = gmm_log_density(x, model.pads);
  double lb = gmm_log_density(x, model.background);
  return lp > lb ? Label::Pads : Label::Background;
}

BinaryMask classify_image(const RgbImage& image, const ClassifierModel& model) {
  detail::PreparedGmm pads(model.pads);
  detail::PreparedGmm background(model.background);

  BinaryMask mask(image.width(), image.height());
  const auto& px = image.pixels();
  auto& lb = mask.labels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    UvPoint p = srgb_to_uv(px[i]);
    double lp = pads.log_density(p.u, p.v);
    double lbg = background.log_density(p.u, p.v);
    lb[i] = lp > lbg ? Label::Pads : Label::Background;
  }
  return mask;
}

BinaryMask binary_opening_3x3(const BinaryMask& mask) {
  int w = mask.width();
  int h = mask.height();
  auto full_neighborhood = [&](int x, int y, Label want) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return false;
        if (mask.at(nx, ny) != want) return false;
      }
    return true;
  };

  BinaryMask eroded(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      eroded.at(x, y) =
          full_neighborhood(x, y, Label::Pads) ? Label::Pads : Label::Background;

  BinaryMask opened(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool any = false;
      for (int dy = -1; dy <= 1 && !any; ++dy)
        for (int dx = -1; dx <= 1 && !any; ++dx) {
          int nx = x + dx, ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < w && ny < h &&
              eroded.at(nx, ny) == Label::Pads)
            any = true;
        }
      opened.at(x, y) = any ? Label::Pads : Label::Background;
    }
  return opened;
}

}  // namespace tg
