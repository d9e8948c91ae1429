#pragma once

#include "core/raster.hpp"

namespace tg {

/// Convert one sRGB pixel to the (u*, v*) chromaticity pair of CIE 1976
/// L*u*v* under the D65 white point. L* is computed internally but only the
/// chroma coordinates are returned; black (L* = 0) maps to (0, 0).
UvPoint srgb_to_uv(Rgb8 pixel);

/// Pixelwise srgb_to_uv over a whole image.
UvPlane image_to_uv(const RgbImage& image);

namespace color {
/// Linear-light value of one 8-bit sRGB channel (IEC 61966-2-1 decoding).
double srgb_channel_to_linear(std::uint8_t value);

/// Inverse of srgb_channel_to_linear for values in [0, 1], rounded to the
/// nearest 8-bit code.
std::uint8_t linear_to_srgb_channel(double linear);
}  // namespace color

}  // namespace tg
