#pragma once

#include <cstdint>

#include "core/raster.hpp"

namespace tg {

/// Parameters for one synthetic clamp scene. The defaults model the target
/// setup: a 640x480 frame, two 60x200 px pads separated by a 300 px gap,
/// pad height 20 mm (so 0.1 mm per pixel).
struct SceneSpec {
  int width = 640;
  int height = 480;
  double gap_px = 300.0;
  double pad_width_px = 60.0;
  double pad_height_px = 200.0;
  double tilt_deg = 0.0;            // clamp rotation about the frame center
  Rgb8 pad_color{206, 38, 46};
  double color_noise_sigma = 8.0;   // per-channel, in 8-bit code values
  double edge_jitter_px = 0.0;      // amplitude of per-row inner-edge jitter
  double brightness = 1.0;          // linear-light scale (luminosity knob)
  double pad_height_mm = 20.0;
  std::uint64_t seed = 0;
};

struct SceneTruth {
  double gap_px = 0.0;
  double pad_height_px = 0.0;
  double pad_height_mm = 0.0;
  double diameter_mm = 0.0;
};

struct Scene {
  RgbImage image;
  BinaryMask mask;  // ideal pads mask, jitter included, noise-free
  SceneTruth truth;
};

/// Render a scene: two tilted red pads with per-row inner-edge jitter over a
/// mottled sky/soil/foliage background with a trunk band filling the gap.
/// Brightness scales linear-light RGB before encoding; Gaussian pixel noise
/// is added in the 8-bit sRGB domain. Deterministic per seed, and the mask
/// and jitters do not depend on the brightness or noise settings.
Scene synth_scene(const SceneSpec& spec);

}  // namespace tg
