#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "core/error.hpp"

namespace tg {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb8&) const = default;
};

/// Chromaticity feature (u*, v*) of CIE 1976 L*u*v*; luminance is discarded.
struct UvPoint {
  double u = 0.0;
  double v = 0.0;
};

enum class Label : std::uint8_t {
  Background = 0,
  Pads = 255,  // masks serialize as raw bytes; 255 is the on-disk value
};

namespace detail {
inline void check_dims(int width, int height, const char* what) {
  if (width < 1 || height < 1)
    fail(ErrorCode::InvalidArgument,
         std::string(what) + ": width and height must be >= 1");
}
}  // namespace detail

/// Row-major 8-bit RGB raster.
class RgbImage {
public:
  RgbImage(int width, int height) : width_(width), height_(height) {
    detail::check_dims(width, height, "RgbImage");
    pixels_.resize(static_cast<std::size_t>(width) * height);
  }

  static RgbImage from_interleaved(int width, int height, const std::uint8_t* rgb) {
    RgbImage img(width, height);
    std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
      img.pixels_[i] = {rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]};
    return img;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  Rgb8& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb8& at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<Rgb8>& pixels() { return pixels_; }
  const std::vector<Rgb8>& pixels() const { return pixels_; }

private:
  int width_;
  int height_;
  std::vector<Rgb8> pixels_;
};

/// Row-major binary label raster (background / pads).
class BinaryMask {
public:
  BinaryMask(int width, int height) : width_(width), height_(height) {
    detail::check_dims(width, height, "BinaryMask");
    labels_.assign(static_cast<std::size_t>(width) * height, Label::Background);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return labels_.size(); }

  Label& at(int x, int y) { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
  Label at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<Label>& labels() { return labels_; }
  const std::vector<Label>& labels() const { return labels_; }

  std::size_t count_pads() const {
    std::size_t n = 0;
    for (Label l : labels_)
      if (l == Label::Pads) ++n;
    return n;
  }

private:
  int width_;
  int height_;
  std::vector<Label> labels_;
};

/// Row-major plane of (u*, v*) features, parallel to an RgbImage.
class UvPlane {
public:
  UvPlane(int width, int height) : width_(width), height_(height) {
    detail::check_dims(width, height, "UvPlane");
    points_.resize(static_cast<std::size_t>(width) * height);
  }

  int width() const { return width_; }
  int height() const { return height_; }

  UvPoint& at(int x, int y) { return points_[static_cast<std::size_t>(y) * width_ + x]; }
  const UvPoint& at(int x, int y) const {
    return points_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<UvPoint>& points() { return points_; }
  const std::vector<UvPoint>& points() const { return points_; }

private:
  int width_;
  int height_;
  std::vector<UvPoint> points_;
};

}  // namespace tg
