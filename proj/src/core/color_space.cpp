#include "core/color_space.hpp"

#include <array>
#include <cmath>

namespace tg {

namespace {

// sRGB -> XYZ (D65) at full double precision, derived from the sRGB primary
// chromaticities R(0.64, 0.33), G(0.30, 0.60), B(0.15, 0.06) and the D65
// white point (0.3127, 0.3290). Commonly quoted 4- or 7-digit roundings of
// this matrix shift u*/v* by up to ~1e-2 for saturated colors, so the exact
// values matter here.
constexpr double kM[3][3] = {
    {0.41239079926595951, 0.35758433938387796, 0.18048078840183429},
    {0.21263900587151036, 0.71516867876775592, 0.072192315360733714},
    {0.019330818715591849, 0.11919477979462599, 0.95053215224966059},
};

// White point = matrix row sums, so that (255,255,255) lands exactly on it.
constexpr double kXn = kM[0][0] + kM[0][1] + kM[0][2];
constexpr double kYn = kM[1][0] + kM[1][1] + kM[1][2];
constexpr double kZn = kM[2][0] + kM[2][1] + kM[2][2];

constexpr double kUnPrime = 4.0 * kXn / (kXn + 15.0 * kYn + 3.0 * kZn);
constexpr double kVnPrime = 9.0 * kYn / (kXn + 15.0 * kYn + 3.0 * kZn);

// CIE L* thresholds (exact rationals).
constexpr double kEps = 216.0 / 24389.0;   // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;  // (29/3)^3

struct GammaTable {
  std::array<double, 256> v{};
  GammaTable() {
    for (int i = 0; i < 256; ++i) {
      double c = i / 255.0;
      v[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
  }
};

const GammaTable& gamma_table() {
  static const GammaTable table;
  return table;
}

}  // namespace

namespace color {

double srgb_channel_to_linear(std::uint8_t value) {
  return gamma_table().v[value];
}

std::uint8_t linear_to_srgb_channel(double linear) {
  if (linear <= 0.0) return 0;
  if (linear >= 1.0) return 255;
  double c = linear <= 0.0031308
                 ? 12.92 * linear
                 : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
  long code = std::lround(c * 255.0);
  if (code < 0) code = 0;
  if (code > 255) code = 255;
  return static_cast<std::uint8_t>(code);
}

}  // namespace color

UvPoint srgb_to_uv(Rgb8 pixel) {
  const auto& lut = gamma_table().v;
  double r = lut[pixel.r];
  double g = lut[pixel.g];
  double b = lut[pixel.b];

  double x = kM[0][0] * r + kM[0][1] * g + kM[0][2] * b;
  double y = kM[1][0] * r + kM[1][1] * g + kM[1][2] * b;
  double z = kM[2][0] * r + kM[2][1] * g + kM[2][2] * b;

  double yr = y / kYn;
  double lstar = yr > kEps ? 116.0 * std::cbrt(yr) - 16.0 : kKappa * yr;
  if (lstar <= 0.0) return {0.0, 0.0};

  double denom = x + 15.0 * y + 3.0 * z;
  // denom == 0 only when x = y = z = 0, which lstar <= 0 already caught.
  double up = 4.0 * x / denom;
  double vp = 9.0 * y / denom;

  return {13.0 * lstar * (up - kUnPrime), 13.0 * lstar * (vp - kVnPrime)};
}

UvPlane image_to_uv(const RgbImage& image) {
  UvPlane plane(image.width(), image.height());
  const auto& src = image.pixels();
  auto& dst = plane.points();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = srgb_to_uv(src[i]);
  return plane;
}

}  // namespace tg
