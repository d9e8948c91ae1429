#include "trunkgauge/trunkgauge.h"

#include <cstring>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "core/color_space.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/geometry.hpp"
#include "core/model_json.hpp"
#include "core/segmentation.hpp"
#include "core/stats.hpp"
#include "core/synth.hpp"

static_assert(sizeof(tg::Rgb8) == 3, "pixel buffer casts assume packed RGB");

struct tg_image {
  tg::RgbImage value;
};

struct tg_mask {
  tg::BinaryMask value;
};

struct tg_classifier {
  tg::ClassifierModel value;
};

namespace {

thread_local std::string g_last_error;

tg_status map_code(tg::ErrorCode code) {
  switch (code) {
    case tg::ErrorCode::InvalidArgument: return TG_ERROR_INVALID_ARGUMENT;
    case tg::ErrorCode::DegenerateData: return TG_ERROR_DEGENERATE_DATA;
    case tg::ErrorCode::FitFailure: return TG_ERROR_FIT_FAILURE;
    case tg::ErrorCode::InsufficientTrainingData:
      return TG_ERROR_INSUFFICIENT_TRAINING_DATA;
    case tg::ErrorCode::PadsNotFound: return TG_ERROR_PADS_NOT_FOUND;
    case tg::ErrorCode::AmbiguousAxis: return TG_ERROR_AMBIGUOUS_AXIS;
    case tg::ErrorCode::Geometry: return TG_ERROR_GEOMETRY;
    case tg::ErrorCode::Parse: return TG_ERROR_PARSE;
  }
  return TG_ERROR_UNKNOWN;
}

/// Run body, translating exceptions into status codes + tg_last_error().
template <typename F>
tg_status guarded(F&& body) {
  try {
    body();
    return TG_OK;
  } catch (const tg::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TG_ERROR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TG_ERROR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return TG_ERROR_UNKNOWN;
  }
}

tg_status invalid(const char* message) {
  g_last_error = message;
  return TG_ERROR_INVALID_ARGUMENT;
}

tg::TrainConfig to_core(const tg_train_config& c) {
  tg::TrainConfig out;
  out.pads_modes = c.pads_modes;
  out.background_modes = c.background_modes;
  if (c.cap_per_class < 1)
    tg::fail(tg::ErrorCode::InvalidArgument, "cap_per_class must be >= 1");
  out.cap_per_class = static_cast<std::size_t>(c.cap_per_class);
  out.rel_tol = c.rel_tol;
  out.max_iters = c.max_iters;
  out.reg_eps = c.reg_eps;
  out.seed = c.seed;
  return out;
}

tg::MeasureConfig to_core(const tg_measure_config& c) {
  tg::MeasureConfig out;
  out.stations = c.stations;
  out.trim.enabled = c.trim_enabled != 0;
  out.trim.k_mad = c.trim_k_mad;
  out.min_area_frac = c.min_area_frac;
  out.min_axis_ratio = c.min_axis_ratio;
  return out;
}

tg_measurement to_c(const tg::MeasurementResult& m) {
  tg_measurement out;
  out.gap_px = m.gap_px;
  out.pad_height_px = m.pad_height_px;
  out.pad_height_mm = m.pad_height_mm;
  out.scale_mm_per_px = m.scale_mm_per_px;
  out.diameter_mm = m.diameter_mm;
  out.samples_used = m.samples_used;
  out.samples_trimmed = m.samples_trimmed;
  out.stations_reduced = m.stations_reduced ? 1 : 0;
  return out;
}

tg::SceneSpec to_core(const tg_scene_spec& s) {
  tg::SceneSpec out;
  out.width = s.width;
  out.height = s.height;
  out.gap_px = s.gap_px;
  out.pad_width_px = s.pad_width_px;
  out.pad_height_px = s.pad_height_px;
  out.tilt_deg = s.tilt_deg;
  out.pad_color = {s.pad_color[0], s.pad_color[1], s.pad_color[2]};
  out.color_noise_sigma = s.color_noise_sigma;
  out.edge_jitter_px = s.edge_jitter_px;
  out.brightness = s.brightness;
  out.pad_height_mm = s.pad_height_mm;
  out.seed = s.seed;
  return out;
}

tg::ConditionSet collect_condition(const tg_image* const* images,
                                   const tg_mask* const* masks,
                                   const double* pad_height_mm, int32_t count) {
  tg::ConditionSet set;
  for (int32_t i = 0; i < count; ++i) {
    set.images.push_back(images[i]->value);
    set.masks.push_back(masks[i]->value);
    set.pad_height_mm.push_back(pad_height_mm[i]);
  }
  return set;
}

}  // namespace

extern "C" {

const char* tg_status_name(tg_status status) {
  switch (status) {
    case TG_OK: return "ok";
    case TG_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case TG_ERROR_DEGENERATE_DATA: return "degenerate_data";
    case TG_ERROR_FIT_FAILURE: return "fit_failure";
    case TG_ERROR_INSUFFICIENT_TRAINING_DATA:
      return "insufficient_training_data";
    case TG_ERROR_PADS_NOT_FOUND: return "pads_not_found";
    case TG_ERROR_AMBIGUOUS_AXIS: return "ambiguous_axis";
    case TG_ERROR_GEOMETRY: return "geometry";
    case TG_ERROR_PARSE: return "parse";
    case TG_ERROR_UNKNOWN: break;
  }
  return "unknown";
}

const char* tg_last_error(void) { return g_last_error.c_str(); }

const char* tg_version(void) { return "1.0.0"; }

/* ---- rasters ----------------------------------------------------- */

tg_status tg_image_create(int32_t width, int32_t height, const uint8_t* rgb,
                          tg_image** out) {
  if (!out) return invalid("out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    auto img = rgb ? tg::RgbImage::from_interleaved(width, height, rgb)
                   : tg::RgbImage(width, height);
    *out = new tg_image{std::move(img)};
  });
}

void tg_image_destroy(tg_image* image) { delete image; }

int32_t tg_image_width(const tg_image* image) {
  return image ? image->value.width() : 0;
}

int32_t tg_image_height(const tg_image* image) {
  return image ? image->value.height() : 0;
}

uint8_t* tg_image_pixels(tg_image* image) {
  if (!image) return nullptr;
  return reinterpret_cast<uint8_t*>(image->value.pixels().data());
}

const uint8_t* tg_image_pixels_const(const tg_image* image) {
  if (!image) return nullptr;
  return reinterpret_cast<const uint8_t*>(image->value.pixels().data());
}

tg_status tg_mask_create(int32_t width, int32_t height, const uint8_t* labels,
                         tg_mask** out) {
  if (!out) return invalid("out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    tg::BinaryMask mask(width, height);
    if (labels) {
      auto& dst = mask.labels();
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = labels[i] ? tg::Label::Pads : tg::Label::Background;
    }
    *out = new tg_mask{std::move(mask)};
  });
}

void tg_mask_destroy(tg_mask* mask) { delete mask; }

int32_t tg_mask_width(const tg_mask* mask) {
  return mask ? mask->value.width() : 0;
}

int32_t tg_mask_height(const tg_mask* mask) {
  return mask ? mask->value.height() : 0;
}

static uint8_t* mask_bytes(tg_mask* mask) {
  static_assert(sizeof(tg::Label) == 1);
  return reinterpret_cast<uint8_t*>(mask->value.labels().data());
}

uint8_t* tg_mask_pixels(tg_mask* mask) {
  return mask ? mask_bytes(mask) : nullptr;
}

const uint8_t* tg_mask_pixels_const(const tg_mask* mask) {
  return mask ? mask_bytes(const_cast<tg_mask*>(mask)) : nullptr;
}

/* ---- color space -------------------------------------------------- */

void tg_srgb_to_uv(uint8_t r, uint8_t g, uint8_t b, double* u, double* v) {
  tg::UvPoint p = tg::srgb_to_uv({r, g, b});
  if (u) *u = p.u;
  if (v) *v = p.v;
}

tg_status tg_image_to_uv(const tg_image* image, double* uv) {
  if (!image || !uv) return invalid("image and uv must not be NULL");
  return guarded([&] {
    const auto& px = image->value.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      tg::UvPoint p = tg::srgb_to_uv(px[i]);
      uv[2 * i] = p.u;
      uv[2 * i + 1] = p.v;
    }
  });
}

/* ---- classifier ---------------------------------------------------- */

void tg_train_config_init(tg_train_config* config) {
  if (!config) return;
  config->pads_modes = 2;
  config->background_modes = 3;
  config->cap_per_class = 200000;
  config->rel_tol = 1e-6;
  config->max_iters = 500;
  config->reg_eps = 1e-6;
  config->seed = 0;
}

tg_status tg_train(const tg_image* const* images, const tg_mask* const* masks,
                   int32_t pair_count, const tg_train_config* config,
                   tg_classifier** out) {
  if (!out) return invalid("out must not be NULL");
  *out = nullptr;
  if (!images || !masks || pair_count < 1)
    return invalid("at least one image/mask pair is required");
  if (!config) return invalid("config must not be NULL");
  return guarded([&] {
    std::vector<tg::LabeledImagePair> pairs;
    pairs.reserve(pair_count);
    for (int32_t i = 0; i < pair_count; ++i) {
      if (!images[i] || !masks[i])
        tg::fail(tg::ErrorCode::InvalidArgument,
                 "image/mask pair contains NULL");
      pairs.push_back({images[i]->value, masks[i]->value});
    }
    *out = new tg_classifier{tg::train_classifier(pairs, to_core(*config))};
  });
}

void tg_classifier_destroy(tg_classifier* classifier) { delete classifier; }

tg_status tg_classifier_to_json(const tg_classifier* classifier, char** out) {
  if (!classifier || !out) return invalid("classifier and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    std::string text = tg::classifier_to_json(classifier->value);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

tg_status tg_classifier_from_json(const char* json, tg_classifier** out) {
  if (!json || !out) return invalid("json and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new tg_classifier{tg::classifier_from_json(json)};
  });
}

void tg_string_destroy(char* str) { delete[] str; }

tg_status tg_classifier_fit_info(const tg_classifier* classifier,
                                 int32_t class_index, tg_fit_info* out) {
  if (!classifier || !out) return invalid("classifier and out must not be NULL");
  if (class_index < 0 || class_index > 1)
    return invalid("class_index must be 0 (pads) or 1 (background)");
  const tg::ClassTrainInfo& info = class_index == 0
                                       ? classifier->value.pads_info
                                       : classifier->value.background_info;
  out->iterations = info.fit.iterations;
  out->final_log_likelihood = info.fit.final_log_likelihood;
  out->converged = info.fit.converged ? 1 : 0;
  out->reinitializations = info.fit.reinitializations;
  out->points_total = static_cast<int64_t>(info.points_total);
  out->points_used = static_cast<int64_t>(info.points_used);
  return TG_OK;
}

tg_status tg_classify_point(const tg_classifier* classifier, double u, double v,
                            int32_t* label) {
  if (!classifier || !label) return invalid("classifier and label must not be NULL");
  return guarded([&] {
    *label = tg::classify_pixel({u, v}, classifier->value) == tg::Label::Pads
                 ? 1
                 : 0;
  });
}

tg_status tg_classify_image(const tg_classifier* classifier,
                            const tg_image* image, tg_mask** out) {
  if (!classifier || !image || !out)
    return invalid("classifier, image and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new tg_mask{tg::classify_image(image->value, classifier->value)};
  });
}

/* ---- measurement --------------------------------------------------- */

void tg_measure_config_init(tg_measure_config* config) {
  if (!config) return;
  config->stations = 50;
  config->trim_enabled = 1;
  config->trim_k_mad = 3.5;
  config->min_area_frac = 0.0005;
  config->min_axis_ratio = 1.5;
}

tg_status tg_measure_mask(const tg_mask* mask, double pad_height_mm,
                          const tg_measure_config* config, tg_measurement* out) {
  if (!mask || !config || !out)
    return invalid("mask, config and out must not be NULL");
  return guarded([&] {
    *out = to_c(
        tg::measure_diameter(mask->value, pad_height_mm, to_core(*config)));
  });
}

tg_status tg_measure_image(const tg_classifier* classifier,
                           const tg_image* image, double pad_height_mm,
                           const tg_measure_config* config, tg_measurement* out) {
  if (!classifier || !image || !config || !out)
    return invalid("classifier, image, config and out must not be NULL");
  return guarded([&] {
    *out = to_c(tg::measure_image(image->value, classifier->value,
                                  pad_height_mm, to_core(*config)));
  });
}

/* ---- synthetic scenes ---------------------------------------------- */

void tg_scene_spec_init(tg_scene_spec* spec) {
  if (!spec) return;
  tg::SceneSpec d;
  spec->width = d.width;
  spec->height = d.height;
  spec->gap_px = d.gap_px;
  spec->pad_width_px = d.pad_width_px;
  spec->pad_height_px = d.pad_height_px;
  spec->tilt_deg = d.tilt_deg;
  spec->pad_color[0] = d.pad_color.r;
  spec->pad_color[1] = d.pad_color.g;
  spec->pad_color[2] = d.pad_color.b;
  spec->color_noise_sigma = d.color_noise_sigma;
  spec->edge_jitter_px = d.edge_jitter_px;
  spec->brightness = d.brightness;
  spec->pad_height_mm = d.pad_height_mm;
  spec->seed = d.seed;
}

tg_status tg_synth_scene(const tg_scene_spec* spec, tg_image** image,
                         tg_mask** mask, tg_scene_truth* truth) {
  if (!spec) return invalid("spec must not be NULL");
  if (image) *image = nullptr;
  if (mask) *mask = nullptr;
  return guarded([&] {
    tg::Scene scene = tg::synth_scene(to_core(*spec));
    if (truth) {
      truth->gap_px = scene.truth.gap_px;
      truth->pad_height_px = scene.truth.pad_height_px;
      truth->pad_height_mm = scene.truth.pad_height_mm;
      truth->diameter_mm = scene.truth.diameter_mm;
    }
    if (image) *image = new tg_image{std::move(scene.image)};
    if (mask) *mask = new tg_mask{std::move(scene.mask)};
  });
}

/* ---- evaluation ----------------------------------------------------- */

tg_status tg_compute_error_stats(const double* measured, const double* reference,
                                 int64_t count, tg_error_stats* out) {
  if (!measured || !reference || !out)
    return invalid("measured, reference and out must not be NULL");
  if (count < 1) return invalid("count must be >= 1");
  return guarded([&] {
    std::vector<double> m(measured, measured + count);
    std::vector<double> r(reference, reference + count);
    tg::ErrorStats s = tg::error_stats(m, r);
    out->mean_abs = s.mean_abs;
    out->std_abs = s.std_abs;
    out->max_abs = s.max_abs;
    out->count = static_cast<int64_t>(s.count);
  });
}

tg_status tg_fraction_below(const double* measured, const double* reference,
                            int64_t count, double threshold, double* out) {
  if (!measured || !reference || !out)
    return invalid("measured, reference and out must not be NULL");
  if (count < 1) return invalid("count must be >= 1");
  return guarded([&] {
    std::vector<double> m(measured, measured + count);
    std::vector<double> r(reference, reference + count);
    *out = tg::error_stats(m, r).fraction_below(threshold);
  });
}

tg_status tg_error_histogram(const double* errors, int64_t count,
                             double bin_width, int64_t* counts, int32_t capacity,
                             int32_t* bins_used) {
  if (count > 0 && !errors) return invalid("errors must not be NULL");
  if (count < 0) return invalid("count must be >= 0");
  if (!bins_used) return invalid("bins_used must not be NULL");
  return guarded([&] {
    std::vector<double> e(count > 0 ? errors : nullptr,
                          count > 0 ? errors + count : nullptr);
    tg::Histogram h = tg::error_histogram(e, bin_width);
    *bins_used = static_cast<int32_t>(h.counts.size());
    if (counts) {
      if (capacity < static_cast<int32_t>(h.counts.size()))
        tg::fail(tg::ErrorCode::InvalidArgument,
                 "histogram buffer capacity too small");
      for (std::size_t i = 0; i < h.counts.size(); ++i) counts[i] = h.counts[i];
    }
  });
}

tg_status tg_luminosity_experiment(
    const tg_image* const* images_a, const tg_mask* const* masks_a,
    const double* pad_height_mm_a, int32_t count_a,
    const tg_image* const* images_b, const tg_mask* const* masks_b,
    const double* pad_height_mm_b, int32_t count_b, int32_t train_count,
    const tg_train_config* train, const tg_measure_config* measure,
    uint64_t seed, tg_condition_row rows[2], double* diffs_a,
    int32_t* diff_count_a, double* diffs_b, int32_t* diff_count_b) {
  if (!images_a || !masks_a || !pad_height_mm_a || !images_b || !masks_b ||
      !pad_height_mm_b || !train || !measure || !rows)
    return invalid("luminosity experiment inputs must not be NULL");
  return guarded([&] {
    tg::LuminosityConfig cfg;
    cfg.train_count = train_count;
    cfg.train = to_core(*train);
    cfg.measure = to_core(*measure);
    cfg.seed = seed;
    tg::LuminosityResult r = tg::run_luminosity(
        collect_condition(images_a, masks_a, pad_height_mm_a, count_a),
        collect_condition(images_b, masks_b, pad_height_mm_b, count_b), cfg);

    auto fill_row = [](const tg::LuminosityRow& src, tg_condition_row& dst) {
      dst.tests = src.tests;
      dst.pairs = src.pairs;
      dst.failures = src.failures;
      dst.mean_abs_diff_mm = src.mean_abs_diff_mm;
      dst.std_abs_diff_mm = src.std_abs_diff_mm;
    };
    fill_row(r.row_a, rows[0]);
    fill_row(r.row_b, rows[1]);
    if (diffs_a)
      for (std::size_t i = 0; i < r.diffs_a.size(); ++i) diffs_a[i] = r.diffs_a[i];
    if (diff_count_a) *diff_count_a = static_cast<int32_t>(r.diffs_a.size());
    if (diffs_b)
      for (std::size_t i = 0; i < r.diffs_b.size(); ++i) diffs_b[i] = r.diffs_b[i];
    if (diff_count_b) *diff_count_b = static_cast<int32_t>(r.diffs_b.size());
  });
}

}  // extern "C"
