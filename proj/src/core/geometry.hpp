#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/raster.hpp"
#include "core/vec2.hpp"

namespace tg {

/// One 8-connected component of pad pixels, with integer moment sums so all
/// derived statistics are exactly translation-equivariant.
struct PadRegion {
  std::vector<std::pair<std::int32_t, std::int32_t>> pixels;  // (x, y)
  std::int64_t sum_x = 0, sum_y = 0;
  std::int64_t sum_xx = 0, sum_xy = 0, sum_yy = 0;

  std::size_t area() const { return pixels.size(); }
  Vec2 centroid() const;
  /// Integer anchor (componentwise floor of the centroid). Measurements are
  /// taken relative to it, which is what makes integer mask shifts change
  /// gap_px and pad_height_px by exactly nothing.
  std::pair<std::int64_t, std::int64_t> anchor() const;
  /// Population covariance of pixel coordinates about the centroid.
  SymMat2 covariance() const;
};

/// One scanline's edge pair: A on the left pad's inner face, B on the right
/// pad's inner face, gap = |A - B| in pixels.
struct EdgePairSample {
  Vec2 a;
  Vec2 b;
  double gap = 0.0;
};

struct EdgeSamples {
  std::vector<EdgePairSample> samples;
  bool stations_reduced = false;  // requested N exceeded the usable extent
};

struct TrimPolicy {
  bool enabled = true;
  double k_mad = 3.5;
};

struct MeasureConfig {
  int stations = 50;             // upper bound on edge-pair stations
  TrimPolicy trim;
  double min_area_frac = 0.0005;  // of total image pixels
  double min_axis_ratio = 1.5;    // eigenvalue ratio below which the axis is
                                  // considered ambiguous
};

struct MeasurementResult {
  double gap_px = 0.0;
  double pad_height_px = 0.0;
  double pad_height_mm = 0.0;
  double scale_mm_per_px = 0.0;
  double diameter_mm = 0.0;
  int samples_used = 0;
  int samples_trimmed = 0;
  bool stations_reduced = false;
};

/// All 8-connected pad components of area >= min_area, largest first.
/// Deterministic order: ties broken by first (raster-order) pixel.
std::vector<PadRegion> connected_pad_regions(const BinaryMask& mask,
                                             std::size_t min_area);

/// The two largest sufficient components, ordered left/right along the
/// measurement direction (perpendicular to the larger pad's long axis).
std::pair<PadRegion, PadRegion> extract_pad_regions(const BinaryMask& mask,
                                                    std::size_t min_area);

/// Principal axis of the region's pixel scatter — the pad's long (C-D)
/// direction. Sign-normalized so the y component is >= 0 (x >= 0 on ties).
/// Throws AmbiguousAxis when the eigenvalue ratio is below min_ratio.
Vec2 estimate_axis(const PadRegion& region, double min_ratio = 1.5);

/// Perpendicular of axis, sign-normalized so it points from left to right
/// (positive x; positive y on ties).
Vec2 measurement_direction(Vec2 axis);

/// At N evenly spaced stations along the pads' common axial extent, take the
/// inner-face boundary pixel (per row, the pixel nearest the gap) whose row
/// the station's line crosses, and measure the Euclidean distance between
/// the two facing pixel edges. Each station samples exactly one face pixel
/// per pad, so adjacent rows' independent edge errors are averaged by the
/// caller rather than max-pooled here. Stations whose line misses a pad's
/// face (or where the faces touch) are dropped.
EdgeSamples sample_edge_pairs(const PadRegion& left, const PadRegion& right,
                              Vec2 axis, int n_stations);

/// Median/MAD outlier rejection followed by the arithmetic mean. With
/// trimming disabled this is exactly the plain mean of all gaps.
/// Returns (gap_px, samples_used, samples_trimmed).
struct GapEstimate {
  double gap_px = 0.0;
  int samples_used = 0;
  int samples_trimmed = 0;
};
GapEstimate mean_gap_pixels(const std::vector<EdgePairSample>& samples,
                            const TrimPolicy& trim);

/// Pad height |C-D| in pixels: the mean axial extent (max - min + 1 of
/// projections onto axis) sampled at lateral stations across the middle half
/// of the pad's width. Sampling the interior keeps jitter on the pad's inner
/// segmentation edge, and rasterization bias at tilted corners, out of the
/// calibration length; for an axis-aligned rectangle it equals the exact
/// column height.
double pad_height_pixels(const PadRegion& region, Vec2 axis);

/// Full measurement: extraction, axis from the larger pad, edge sampling,
/// trimmed averaging, calibration against the same pad that gave the axis.
MeasurementResult measure_diameter(const BinaryMask& mask, double pad_height_mm,
                                   const MeasureConfig& config);

}  // namespace tg
