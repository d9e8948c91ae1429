#include "core/synth.hpp"

#include <cmath>
#include <vector>

#include "core/color_space.hpp"
#include "core/rng.hpp"

namespace tg {

namespace {

constexpr std::uint64_t kBackgroundTag = 1;
constexpr std::uint64_t kJitterTag = 2;
constexpr std::uint64_t kNoiseTag = 3;

constexpr Rgb8 kSky{168, 196, 220};
constexpr Rgb8 kSkyDeep{140, 172, 205};
constexpr Rgb8 kSoil{121, 92, 64};
constexpr Rgb8 kFoliage{79, 111, 58};
constexpr Rgb8 kTrunk{108, 85, 62};

void validate(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    fail(ErrorCode::InvalidArgument, "scene dimensions must be >= 1");
  if (!(spec.gap_px > 0.0) || !(spec.pad_width_px > 0.0) ||
      !(spec.pad_height_px > 0.0))
    fail(ErrorCode::InvalidArgument, "gap and pad dimensions must be > 0");
  if (!(spec.brightness > 0.0))
    fail(ErrorCode::InvalidArgument, "brightness must be > 0");
  if (spec.color_noise_sigma < 0.0 || spec.edge_jitter_px < 0.0)
    fail(ErrorCode::InvalidArgument, "noise and jitter must be >= 0");
  if (!(spec.pad_height_mm > 0.0))
    fail(ErrorCode::InvalidArgument, "pad_height_mm must be > 0");

  // All pad corners (with jitter headroom on the inner edge) must land in
  // the frame.
  double rad = spec.tilt_deg * (3.14159265358979323846 / 180.0);
  double c = std::cos(rad), s = std::sin(rad);
  double cx = 0.5 * spec.width, cy = 0.5 * spec.height;
  double inner = 0.5 * spec.gap_px - spec.edge_jitter_px;
  double outer = 0.5 * spec.gap_px + spec.pad_width_px;
  double half_h = 0.5 * spec.pad_height_px;
  for (double qx : {-outer, -inner, inner, outer})
    for (double qy : {-half_h, half_h}) {
      double px = cx + c * qx - s * qy;
      double py = cy + s * qx + c * qy;
      if (px < 1.0 || py < 1.0 || px > spec.width - 2.0 ||
          py > spec.height - 2.0)
        fail(ErrorCode::InvalidArgument, "pads extend outside the frame");
    }
}

Rgb8 shade(Rgb8 base, double brightness) {
  if (brightness == 1.0) return base;
  auto map = [&](std::uint8_t ch) {
    return color::linear_to_srgb_channel(
        color::srgb_channel_to_linear(ch) * brightness);
  };
  return {map(base.r), map(base.g), map(base.b)};
}

std::uint8_t add_noise(std::uint8_t value, double noise) {
  double v = value + noise;
  if (v < 0.0) return 0;
  if (v > 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

}  // namespace

Scene synth_scene(const SceneSpec& spec) {
  validate(spec);

  Rng base(spec.seed);
  Rng bg_rng = base.fork(kBackgroundTag);
  Rng jitter_rng = base.fork(kJitterTag);
  Rng noise_rng = base.fork(kNoiseTag);

  int w = spec.width, h = spec.height;

  // Mottled background: sky base plus random axis-aligned patches.
  RgbImage background(w, h);
  for (Rgb8& p : background.pixels()) p = kSky;
  const Rgb8 palette[] = {kSoil, kFoliage, kSkyDeep};
  int n_patches = 24;
  for (int i = 0; i < n_patches; ++i) {
    double px = bg_rng.uniform01() * w;
    double py = bg_rng.uniform01() * h;
    double pw = 20.0 + bg_rng.uniform01() * (w / 3.0);
    double ph = 20.0 + bg_rng.uniform01() * (h / 3.0);
    Rgb8 color = palette[bg_rng.index(3)];
    int x0 = std::max(0, static_cast<int>(px - 0.5 * pw));
    int x1 = std::min(w - 1, static_cast<int>(px + 0.5 * pw));
    int y0 = std::max(0, static_cast<int>(py - 0.5 * ph));
    int y1 = std::min(h - 1, static_cast<int>(py + 0.5 * ph));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) background.at(x, y) = color;
  }

  // Per-row jitter of each pad's inner (gap-facing) edge, in whole pixels:
  // round(U(-J, J)) is uniform over the 2*floor(J+0.5)+1 integer offsets.
  // Indexed by image row, so every scanline that crosses an inner edge sees
  // exactly one displacement per pad; the rasterized edge is then a zero-mean
  // perturbation of the nominal face at any tilt. (Indexing by clamp-frame
  // row instead lets the row index flip inside the jitter zone on tilted
  // scenes, and the painted edge becomes the max of adjacent draws — a
  // systematic inward bias.)
  auto n_rows = static_cast<std::size_t>(h);
  std::vector<double> jitter_left(n_rows, 0.0), jitter_right(n_rows, 0.0);
  if (spec.edge_jitter_px > 0.0) {
    for (double& j : jitter_left)
      j = static_cast<double>(
          std::lround(jitter_rng.uniform(-spec.edge_jitter_px, spec.edge_jitter_px)));
    for (double& j : jitter_right)
      j = static_cast<double>(
          std::lround(jitter_rng.uniform(-spec.edge_jitter_px, spec.edge_jitter_px)));
  }

  double rad = spec.tilt_deg * (3.14159265358979323846 / 180.0);
  double cos_t = std::cos(rad), sin_t = std::sin(rad);
  double cx = 0.5 * w, cy = 0.5 * h;
  double half_gap = 0.5 * spec.gap_px;
  double half_h = 0.5 * spec.pad_height_px;

  Rgb8 pad_shaded = shade(spec.pad_color, spec.brightness);
  Rgb8 trunk_shaded = shade(kTrunk, spec.brightness);

  Scene scene{RgbImage(w, h), BinaryMask(w, h),
              {spec.gap_px, spec.pad_height_px, spec.pad_height_mm,
               spec.gap_px * spec.pad_height_mm / spec.pad_height_px}};

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx = x - cx, dy = y - cy;
      // Clamp frame: rotate by -tilt.
      double qx = cos_t * dx + sin_t * dy;
      double qy = -sin_t * dx + cos_t * dy;

      Rgb8 color;
      bool is_pad = false;
      if (qy >= -half_h && qy < half_h) {
        auto row = static_cast<std::size_t>(y);
        if (qx >= -half_gap - spec.pad_width_px &&
            qx < -half_gap + jitter_left[row])
          is_pad = true;  // left pad, inner edge jittered toward/away the gap
        else if (qx >= half_gap - jitter_right[row] &&
                 qx < half_gap + spec.pad_width_px)
          is_pad = true;  // right pad
      }
      if (is_pad) {
        color = pad_shaded;
        scene.mask.at(x, y) = Label::Pads;
      } else if (qx >= -half_gap && qx < half_gap) {
        color = trunk_shaded;  // trunk fills the gap, full frame height
      } else {
        color = shade(background.at(x, y), spec.brightness);
      }

      // Sensor noise: always drawn, so the stream stays aligned no matter
      // what was painted.
      double nr = noise_rng.normal();
      double ng = noise_rng.normal();
      double nb = noise_rng.normal();
      if (spec.color_noise_sigma > 0.0) {
        color = {add_noise(color.r, nr * spec.color_noise_sigma),
                 add_noise(color.g, ng * spec.color_noise_sigma),
                 add_noise(color.b, nb * spec.color_noise_sigma)};
      }
      scene.image.at(x, y) = color;
    }
  }
  return scene;
}

}  // namespace tg
