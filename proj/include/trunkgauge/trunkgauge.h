/* trunkgauge — trunk diameter from clamp photos.
 *
 * C API for the shared library. All functions returning tg_status use
 * TG_OK (0) for success; on failure tg_last_error() returns a thread-local
 * message describing what went wrong. Objects are opaque handles created
 * and destroyed through matching functions; destroy functions accept NULL.
 */
#ifndef TRUNKGAUGE_H
#define TRUNKGAUGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TG_API __declspec(dllexport)
#else
#  define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
  TG_OK = 0,
  TG_ERROR_INVALID_ARGUMENT = 1,
  TG_ERROR_DEGENERATE_DATA = 2,
  TG_ERROR_FIT_FAILURE = 3,
  TG_ERROR_INSUFFICIENT_TRAINING_DATA = 4,
  TG_ERROR_PADS_NOT_FOUND = 5,
  TG_ERROR_AMBIGUOUS_AXIS = 6,
  TG_ERROR_GEOMETRY = 7,
  TG_ERROR_PARSE = 8,
  TG_ERROR_UNKNOWN = 9
} tg_status;

TG_API const char* tg_status_name(tg_status status);

/* Message for the most recent failure on this thread; never NULL. */
TG_API const char* tg_last_error(void);

TG_API const char* tg_version(void);

/* ------------------------------------------------------------------ */
/* Rasters                                                             */

typedef struct tg_image tg_image;  /* 8-bit RGB, row-major interleaved   */
typedef struct tg_mask tg_mask;    /* 8-bit labels: 0 bg, 255 pads       */

/* rgb may be NULL for a zero-filled image. */
TG_API tg_status tg_image_create(int32_t width, int32_t height,
                                 const uint8_t* rgb, tg_image** out);
TG_API void tg_image_destroy(tg_image* image);
TG_API int32_t tg_image_width(const tg_image* image);
TG_API int32_t tg_image_height(const tg_image* image);
TG_API uint8_t* tg_image_pixels(tg_image* image);
TG_API const uint8_t* tg_image_pixels_const(const tg_image* image);

/* labels may be NULL for all-background; nonzero bytes become pads. */
TG_API tg_status tg_mask_create(int32_t width, int32_t height,
                                const uint8_t* labels, tg_mask** out);
TG_API void tg_mask_destroy(tg_mask* mask);
TG_API int32_t tg_mask_width(const tg_mask* mask);
TG_API int32_t tg_mask_height(const tg_mask* mask);
TG_API uint8_t* tg_mask_pixels(tg_mask* mask);
TG_API const uint8_t* tg_mask_pixels_const(const tg_mask* mask);

/* ------------------------------------------------------------------ */
/* Color space                                                         */

/* CIE 1976 (u*, v*) of an sRGB pixel under D65; L* is discarded. */
TG_API void tg_srgb_to_uv(uint8_t r, uint8_t g, uint8_t b, double* u,
                          double* v);

/* uv must hold 2 * width * height doubles; filled row-major as u,v pairs. */
TG_API tg_status tg_image_to_uv(const tg_image* image, double* uv);

/* ------------------------------------------------------------------ */
/* Classifier                                                          */

typedef struct tg_classifier tg_classifier;

typedef struct tg_train_config {
  int32_t pads_modes;       /* default 2 */
  int32_t background_modes; /* default 3 */
  int64_t cap_per_class;    /* default 200000 training pixels per class */
  double rel_tol;           /* default 1e-6 */
  int32_t max_iters;        /* default 500 */
  double reg_eps;           /* default 1e-6 */
  uint64_t seed;            /* default 0 */
} tg_train_config;

TG_API void tg_train_config_init(tg_train_config* config);

/* images[i] and masks[i] form one labeled pair; mask pads = foreground. */
TG_API tg_status tg_train(const tg_image* const* images,
                          const tg_mask* const* masks, int32_t pair_count,
                          const tg_train_config* config, tg_classifier** out);
TG_API void tg_classifier_destroy(tg_classifier* classifier);

/* JSON round-trip. Strings returned through out belong to the caller;
 * release them with tg_string_destroy. */
TG_API tg_status tg_classifier_to_json(const tg_classifier* classifier,
                                       char** out);
TG_API tg_status tg_classifier_from_json(const char* json, tg_classifier** out);
TG_API void tg_string_destroy(char* str);

typedef struct tg_fit_info {
  int32_t iterations;
  double final_log_likelihood;
  int32_t converged;
  int32_t reinitializations;
  int64_t points_total;
  int64_t points_used;
} tg_fit_info;

/* class_index: 0 = pads, 1 = background. */
TG_API tg_status tg_classifier_fit_info(const tg_classifier* classifier,
                                        int32_t class_index, tg_fit_info* out);

/* label: 0 background, 1 pads. Ties go to background. */
TG_API tg_status tg_classify_point(const tg_classifier* classifier, double u,
                                   double v, int32_t* label);
TG_API tg_status tg_classify_image(const tg_classifier* classifier,
                                   const tg_image* image, tg_mask** out);

/* ------------------------------------------------------------------ */
/* Measurement                                                         */

typedef struct tg_measure_config {
  int32_t stations;      /* default 50 scanlines */
  int32_t trim_enabled;  /* default 1 */
  double trim_k_mad;     /* default 3.5 */
  double min_area_frac;  /* default 0.0005 of image pixels */
  double min_axis_ratio; /* default 1.5 */
} tg_measure_config;

TG_API void tg_measure_config_init(tg_measure_config* config);

typedef struct tg_measurement {
  double gap_px;
  double pad_height_px;
  double pad_height_mm;
  double scale_mm_per_px;
  double diameter_mm;
  int32_t samples_used;
  int32_t samples_trimmed;
  int32_t stations_reduced;
} tg_measurement;

TG_API tg_status tg_measure_mask(const tg_mask* mask, double pad_height_mm,
                                 const tg_measure_config* config,
                                 tg_measurement* out);

/* classify_image + measure_mask in one call. */
TG_API tg_status tg_measure_image(const tg_classifier* classifier,
                                  const tg_image* image, double pad_height_mm,
                                  const tg_measure_config* config,
                                  tg_measurement* out);

/* ------------------------------------------------------------------ */
/* Synthetic scenes                                                    */

typedef struct tg_scene_spec {
  int32_t width, height;
  double gap_px;
  double pad_width_px, pad_height_px;
  double tilt_deg;
  uint8_t pad_color[3];
  double color_noise_sigma;
  double edge_jitter_px;
  double brightness;
  double pad_height_mm;
  uint64_t seed;
} tg_scene_spec;

TG_API void tg_scene_spec_init(tg_scene_spec* spec);

typedef struct tg_scene_truth {
  double gap_px;
  double pad_height_px;
  double pad_height_mm;
  double diameter_mm;
} tg_scene_truth;

/* Any of image/mask/truth may be NULL when not wanted. */
TG_API tg_status tg_synth_scene(const tg_scene_spec* spec, tg_image** image,
                                tg_mask** mask, tg_scene_truth* truth);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

typedef struct tg_error_stats {
  double mean_abs;
  double std_abs; /* n-1 denominator */
  double max_abs;
  int64_t count;
} tg_error_stats;

TG_API tg_status tg_compute_error_stats(const double* measured,
                                        const double* reference, int64_t count,
                                        tg_error_stats* out);

/* Fraction of |measured - reference| strictly below threshold. */
TG_API tg_status tg_fraction_below(const double* measured,
                                   const double* reference, int64_t count,
                                   double threshold, double* out);

/* Half-open bins [k*w, (k+1)*w). Call with counts=NULL to query the needed
 * bin count in *bins_used, then again with a buffer of that capacity. */
TG_API tg_status tg_error_histogram(const double* errors, int64_t count,
                                    double bin_width, int64_t* counts,
                                    int32_t capacity, int32_t* bins_used);

/* Luminosity protocol on caller-provided scene sets. rows[0] reports
 * condition A's test images (matched = model A), rows[1] condition B's.
 * diffs_a/diffs_b (capacity >= count_a/count_b) receive the per-pair
 * |matched - crossed| values when non-NULL. */
typedef struct tg_condition_row {
  int32_t tests;
  int32_t pairs;
  int32_t failures;
  double mean_abs_diff_mm;
  double std_abs_diff_mm;
} tg_condition_row;

TG_API tg_status tg_luminosity_experiment(
    const tg_image* const* images_a, const tg_mask* const* masks_a,
    const double* pad_height_mm_a, int32_t count_a,
    const tg_image* const* images_b, const tg_mask* const* masks_b,
    const double* pad_height_mm_b, int32_t count_b, int32_t train_count,
    const tg_train_config* train, const tg_measure_config* measure,
    uint64_t seed, tg_condition_row rows[2], double* diffs_a,
    int32_t* diff_count_a, double* diffs_b, int32_t* diff_count_b);

#ifdef __cplusplus
}
#endif

#endif /* TRUNKGAUGE_H */
