#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tg {

namespace {

constexpr double kSlabTol = 1e-9;  // half-width tolerance when binning
                                   // projections into unit slabs

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Pixel projections onto an (axis, direction) frame anchored at integer
/// (ox, oy). Inputs are integers, so the projections — and everything
/// derived from them — are bitwise identical under integer translation.
struct Projected {
  std::vector<double> t;  // along axis
  std::vector<double> s;  // along measurement direction
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -std::numeric_limits<double>::infinity();
  double smin = std::numeric_limits<double>::infinity();
  double smax = -std::numeric_limits<double>::infinity();
};

Projected project(const PadRegion& region, std::int64_t ox, std::int64_t oy,
                  Vec2 axis, Vec2 dir) {
  Projected out;
  out.t.reserve(region.pixels.size());
  out.s.reserve(region.pixels.size());
  for (auto [px, py] : region.pixels) {
    double rx = static_cast<double>(px - ox);
    double ry = static_cast<double>(py - oy);
    double t = rx * axis.x + ry * axis.y;
    double s = rx * dir.x + ry * dir.y;
    out.t.push_back(t);
    out.s.push_back(s);
    out.tmin = std::min(out.tmin, t);
    out.tmax = std::max(out.tmax, t);
    out.smin = std::min(out.smin, s);
    out.smax = std::max(out.smax, s);
  }
  return out;
}

/// Indices bucketed by floor(key - key_min) for fast slab lookups.
struct Buckets {
  std::vector<std::vector<std::int32_t>> bins;
  double origin = 0.0;

  Buckets(const std::vector<double>& key, double key_min, double key_max) {
    origin = key_min;
    std::size_t n_bins = static_cast<std::size_t>(key_max - key_min) + 2;
    bins.resize(n_bins);
    for (std::size_t i = 0; i < key.size(); ++i) {
      auto b = static_cast<std::size_t>(key[i] - origin);
      if (b >= bins.size()) b = bins.size() - 1;
      bins[b].push_back(static_cast<std::int32_t>(i));
    }
  }

  /// Visit every index whose key may lie within [center-0.5, center+0.5].
  template <typename F>
  void for_slab(double center, F&& visit) const {
    double lo = center - 0.5 - kSlabTol - origin;
    double hi = center + 0.5 + kSlabTol - origin;
    auto first = lo <= 0.0 ? 0 : static_cast<std::int64_t>(lo);
    auto last = hi <= 0.0 ? 0 : static_cast<std::int64_t>(hi);
    for (std::int64_t b = first;
         b <= last && b < static_cast<std::int64_t>(bins.size()); ++b)
      for (std::int32_t i : bins[b]) visit(i);
  }
};

/// Centers of `count` equal subdivisions of [lo, hi]. Cell-centered rather
/// than endpoint-inclusive placement keeps the extreme stations off the very
/// ends of the extent, where a tilted pad's cross-section degenerates into a
/// corner wedge and the innermost pixel no longer lies on the inner face.
std::vector<double> station_positions(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(count);
  double step = (hi - lo) / count;
  for (int k = 0; k < count; ++k) out.push_back(lo + (k + 0.5) * step);
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// A pad's inner face: per pixel row (or column, whichever grid direction is
/// more perpendicular to dir), the single pixel nearest the gap. Stations
/// sample one face pixel each; picking the innermost pixel of a whole axial
/// slab instead would take a max over several rows' independent edge errors
/// and bias every gap inward.
struct FaceSet {
  std::int32_t key_min = 0;
  std::vector<std::int32_t> pick;  // row - key_min -> projection index, or -1
  double s_median = 0.0;           // robust nominal face position
};

FaceSet inner_faces(const PadRegion& region, const Projected& p, Vec2 dir,
                    bool gap_toward_positive_s) {
  const bool rows_are_y = std::fabs(dir.x) >= std::fabs(dir.y);
  std::int32_t key_min = std::numeric_limits<std::int32_t>::max();
  std::int32_t key_max = std::numeric_limits<std::int32_t>::min();
  for (auto [px, py] : region.pixels) {
    std::int32_t k = rows_are_y ? py : px;
    key_min = std::min(key_min, k);
    key_max = std::max(key_max, k);
  }
  FaceSet out;
  out.key_min = key_min;
  out.pick.assign(static_cast<std::size_t>(key_max - key_min) + 1, -1);
  for (std::size_t i = 0; i < region.pixels.size(); ++i) {
    auto [px, py] = region.pixels[i];
    auto k = static_cast<std::size_t>((rows_are_y ? py : px) - key_min);
    std::int32_t cur = out.pick[k];
    // Within one row s is strictly monotone in the dominant coordinate, so
    // there are no ties to break here.
    if (cur < 0 || (gap_toward_positive_s ? p.s[i] > p.s[cur]
                                          : p.s[i] < p.s[cur]))
      out.pick[k] = static_cast<std::int32_t>(i);
  }
  std::vector<double> face_s;
  face_s.reserve(out.pick.size());
  for (std::int32_t i : out.pick)
    if (i >= 0) face_s.push_back(p.s[static_cast<std::size_t>(i)]);
  out.s_median = median_of(std::move(face_s));
  return out;
}

}  // namespace

Vec2 PadRegion::centroid() const {
  double n = static_cast<double>(pixels.size());
  return {static_cast<double>(sum_x) / n, static_cast<double>(sum_y) / n};
}

std::pair<std::int64_t, std::int64_t> PadRegion::anchor() const {
  auto n = static_cast<std::int64_t>(pixels.size());
  return {floor_div(sum_x, n), floor_div(sum_y, n)};
}

SymMat2 PadRegion::covariance() const {
  auto n = static_cast<std::int64_t>(pixels.size());
  auto [ax, ay] = anchor();
  // Integer central-ish moments about the anchor, then the exact shift to
  // the true centroid. Every term is an integer (or a ratio of integers),
  // so translation cannot perturb a single bit.
  std::int64_t sxx = sum_xx - 2 * ax * sum_x + n * ax * ax;
  std::int64_t sxy = sum_xy - ax * sum_y - ay * sum_x + n * ax * ay;
  std::int64_t syy = sum_yy - 2 * ay * sum_y + n * ay * ay;
  double rx = static_cast<double>(sum_x - n * ax) / static_cast<double>(n);
  double ry = static_cast<double>(sum_y - n * ay) / static_cast<double>(n);
  double inv_n = 1.0 / static_cast<double>(n);
  return {static_cast<double>(sxx) * inv_n - rx * rx,
          static_cast<double>(sxy) * inv_n - rx * ry,
          static_cast<double>(syy) * inv_n - ry * ry};
}

std::vector<PadRegion> connected_pad_regions(const BinaryMask& mask,
                                             std::size_t min_area) {
  int w = mask.width();
  int h = mask.height();
  const auto& labels = mask.labels();
  std::vector<bool> seen(labels.size(), false);
  std::vector<PadRegion> regions;
  std::vector<std::int32_t> stack;

  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (labels[start] != Label::Pads || seen[start]) continue;
    PadRegion region;
    stack.clear();
    stack.push_back(static_cast<std::int32_t>(start));
    seen[start] = true;
    while (!stack.empty()) {
      std::int32_t idx = stack.back();
      stack.pop_back();
      std::int32_t x = idx % w;
      std::int32_t y = idx / w;
      region.pixels.emplace_back(x, y);
      region.sum_x += x;
      region.sum_y += y;
      region.sum_xx += static_cast<std::int64_t>(x) * x;
      region.sum_xy += static_cast<std::int64_t>(x) * y;
      region.sum_yy += static_cast<std::int64_t>(y) * y;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (labels[nidx] == Label::Pads && !seen[nidx]) {
            seen[nidx] = true;
            stack.push_back(static_cast<std::int32_t>(nidx));
          }
        }
    }
    if (region.area() >= min_area) regions.push_back(std::move(region));
  }

  // Largest first; discovery (raster) order breaks ties deterministically.
  std::stable_sort(regions.begin(), regions.end(),
                   [](const PadRegion& a, const PadRegion& b) {
                     return a.area() > b.area();
                   });
  return regions;
}

std::pair<PadRegion, PadRegion> extract_pad_regions(const BinaryMask& mask,
                                                    std::size_t min_area) {
  std::vector<PadRegion> regions = connected_pad_regions(mask, min_area);
  if (regions.size() < 2) {
    std::string msg = "expected 2 pad regions of area >= " +
                      std::to_string(min_area) + ", found " +
                      std::to_string(regions.size());
    if (!regions.empty()) {
      msg += " (areas:";
      for (const PadRegion& r : regions) msg += " " + std::to_string(r.area());
      msg += ")";
    }
    fail(ErrorCode::PadsNotFound, msg);
  }

  PadRegion a = std::move(regions[0]);
  PadRegion b = std::move(regions[1]);
  Vec2 axis = a.covariance().principal_axis();
  if (axis.y < 0.0 || (axis.y == 0.0 && axis.x < 0.0)) axis = axis * -1.0;
  Vec2 dir = measurement_direction(axis);
  double pa = a.centroid().dot(dir);
  double pb = b.centroid().dot(dir);
  if (pb < pa) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

Vec2 estimate_axis(const PadRegion& region, double min_ratio) {
  if (region.area() < 2)
    fail(ErrorCode::AmbiguousAxis, "region has fewer than 2 pixels");
  SymMat2 cov = region.covariance();
  double lam_max = cov.max_eigenvalue();
  double lam_min = cov.min_eigenvalue();
  if (lam_max <= 0.0)
    fail(ErrorCode::AmbiguousAxis, "region scatter is degenerate");
  // A tiny or negative lam_min means a pixel-thin region: perfectly
  // elongated, axis well defined. Otherwise require real elongation.
  if (lam_min > 1e-9 * lam_max && lam_max / lam_min < min_ratio)
    fail(ErrorCode::AmbiguousAxis,
         "region is too isotropic for a reliable axis (eigenvalue ratio " +
             std::to_string(lam_max / lam_min) + " < " +
             std::to_string(min_ratio) + ")");
  Vec2 axis = cov.principal_axis();
  if (axis.y < 0.0 || (axis.y == 0.0 && axis.x < 0.0)) axis = axis * -1.0;
  return axis;
}

Vec2 measurement_direction(Vec2 axis) {
  Vec2 d = axis.perp();
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) d = d * -1.0;
  return d;
}

EdgeSamples sample_edge_pairs(const PadRegion& left, const PadRegion& right,
                              Vec2 axis, int n_stations) {
  if (n_stations < 1)
    fail(ErrorCode::InvalidArgument, "station count must be >= 1");
  if (left.area() == 0 || right.area() == 0)
    fail(ErrorCode::InvalidArgument, "empty pad region");
  double norm = axis.norm();
  if (!(norm > 0.0)) fail(ErrorCode::InvalidArgument, "zero measurement axis");
  axis = axis / norm;
  Vec2 dir = measurement_direction(axis);

  auto [ox, oy] = left.anchor();
  Projected pl = project(left, ox, oy, axis, dir);
  Projected pr = project(right, ox, oy, axis, dir);

  double lo = std::max(pl.tmin, pr.tmin);
  double hi = std::min(pl.tmax, pr.tmax);
  if (hi < lo)
    fail(ErrorCode::Geometry,
         "pad regions do not overlap along the measurement axis");

  int n_avail = static_cast<int>(std::floor(hi - lo + kSlabTol)) + 1;
  EdgeSamples out;
  int n = n_stations;
  if (n_avail < n) {
    n = n_avail;
    out.stations_reduced = true;
  }

  FaceSet fl = inner_faces(left, pl, dir, /*gap_toward_positive_s=*/true);
  FaceSet fr = inner_faces(right, pr, dir, /*gap_toward_positive_s=*/false);
  double ax_o = static_cast<double>(ox);
  double ay_o = static_cast<double>(oy);

  // A station's line crosses each inner face in exactly one pixel row; find
  // that row from the pad's nominal face position and sample its face pixel.
  // Proximity search in t instead would drop or re-pick rows whenever edge
  // noise perturbs their axial projections, and which rows survive would
  // correlate with the noise itself.
  const bool rows_are_y = std::fabs(dir.x) >= std::fabs(dir.y);
  const std::int64_t anchor_row = rows_are_y ? oy : ox;
  const double axis_row = rows_are_y ? axis.y : axis.x;
  const double dir_row = rows_are_y ? dir.y : dir.x;
  // Row index relative to key_min: every term is invariant under integer
  // translation (anchor minus the region's own row minimum), so the chosen
  // row — and the whole measurement — shifts bitwise-exactly with the mask.
  auto face_at = [&](const FaceSet& f, double tk) -> std::int32_t {
    double c = static_cast<double>(anchor_row - f.key_min) +
               axis_row * tk + dir_row * f.s_median;
    auto row = static_cast<std::int64_t>(std::floor(c + 0.5));
    if (row < 0 || row >= static_cast<std::int64_t>(f.pick.size())) return -1;
    return f.pick[static_cast<std::size_t>(row)];
  };

  for (double tk : station_positions(lo, hi, n)) {
    std::int32_t li = face_at(fl, tk);
    std::int32_t ri = face_at(fr, tk);
    if (li < 0 || ri < 0) continue;

    // Facing pixel edges: half a pixel inward from each boundary center.
    double a_face = pl.s[static_cast<std::size_t>(li)] + 0.5;
    double b_face = pr.s[static_cast<std::size_t>(ri)] - 0.5;
    double gap = b_face - a_face;
    if (!(gap > 0.0)) continue;

    EdgePairSample sample;
    sample.a = {ax_o + axis.x * tk + dir.x * a_face,
                ay_o + axis.y * tk + dir.y * a_face};
    sample.b = {ax_o + axis.x * tk + dir.x * b_face,
                ay_o + axis.y * tk + dir.y * b_face};
    sample.gap = gap;
    out.samples.push_back(sample);
  }

  if (out.samples.empty())
    fail(ErrorCode::Geometry, "no usable edge-pair stations");
  return out;
}

GapEstimate mean_gap_pixels(const std::vector<EdgePairSample>& samples,
                            const TrimPolicy& trim) {
  if (samples.empty())
    fail(ErrorCode::InvalidArgument, "no edge-pair samples to average");
  if (trim.enabled && !(trim.k_mad >= 0.0))
    fail(ErrorCode::InvalidArgument, "trim threshold must be >= 0");

  std::vector<double> gaps;
  gaps.reserve(samples.size());
  for (const EdgePairSample& s : samples) gaps.push_back(s.gap);

  GapEstimate est;
  if (!trim.enabled) {
    double sum = 0.0;
    for (double g : gaps) sum += g;
    est.gap_px = sum / static_cast<double>(gaps.size());
    est.samples_used = static_cast<int>(gaps.size());
    est.samples_trimmed = 0;
    return est;
  }

  double med = median_of(gaps);
  std::vector<double> dev;
  dev.reserve(gaps.size());
  for (double g : gaps) dev.push_back(std::fabs(g - med));
  double mad = median_of(dev);

  double threshold = trim.k_mad * mad;
  double sum = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (dev[i] <= threshold) {
      sum += gaps[i];
      ++used;
    }
  }
  // At least half the samples sit within one MAD of the median, so the
  // survivor set is never empty.
  est.gap_px = sum / used;
  est.samples_used = used;
  est.samples_trimmed = static_cast<int>(gaps.size()) - used;
  return est;
}

double pad_height_pixels(const PadRegion& region, Vec2 axis) {
  if (region.area() == 0)
    fail(ErrorCode::InvalidArgument, "empty pad region");
  double norm = axis.norm();
  if (!(norm > 0.0)) fail(ErrorCode::InvalidArgument, "zero measurement axis");
  axis = axis / norm;
  Vec2 dir = measurement_direction(axis);

  auto [ox, oy] = region.anchor();
  Projected p = project(region, ox, oy, axis, dir);

  // Lateral stations across the middle half of the pad's width.
  double span = p.smax - p.smin;
  double lo = p.smin + 0.25 * span;
  double hi = p.smax - 0.25 * span;
  int n = std::min(48, static_cast<int>(std::floor(hi - lo + kSlabTol)) + 1);

  Buckets buckets(p.s, p.smin, p.smax);
  double sum = 0.0;
  int counted = 0;
  for (double sk : station_positions(lo, hi, n)) {
    double t_lo = std::numeric_limits<double>::infinity();
    double t_hi = -std::numeric_limits<double>::infinity();
    buckets.for_slab(sk, [&](std::int32_t i) {
      if (std::fabs(p.s[i] - sk) <= 0.5 + kSlabTol) {
        t_lo = std::min(t_lo, p.t[i]);
        t_hi = std::max(t_hi, p.t[i]);
      }
    });
    if (t_hi < t_lo) continue;
    sum += (t_hi - t_lo) + 1.0;
    ++counted;
  }
  if (counted == 0)
    fail(ErrorCode::Geometry, "pad region is degenerate along its axis");
  return sum / counted;
}

MeasurementResult measure_diameter(const BinaryMask& mask, double pad_height_mm,
                                   const MeasureConfig& config) {
  if (!(pad_height_mm > 0.0))
    fail(ErrorCode::InvalidArgument, "pad_height_mm must be > 0");
  if (config.stations < 1)
    fail(ErrorCode::InvalidArgument, "stations must be >= 1");
  if (!(config.min_area_frac >= 0.0) || config.min_area_frac > 1.0)
    fail(ErrorCode::InvalidArgument, "min_area_frac must be in [0, 1]");
  if (!(config.min_axis_ratio >= 1.0))
    fail(ErrorCode::InvalidArgument, "min_axis_ratio must be >= 1");

  // Each stage re-tags its failures so callers can tell where a bad mask
  // fell out of the pipeline.
  auto staged = [](const char* name, auto&& body) {
    try {
      return body();
    } catch (const Error& e) {
      fail(e.code(), std::string(name) + ": " + e.what());
    }
  };

  std::size_t min_area = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(config.min_area_frac *
                      static_cast<double>(mask.pixel_count()))));

  auto [left, right] = staged("pad extraction", [&] {
    return extract_pad_regions(mask, min_area);
  });
  const PadRegion& larger = left.area() >= right.area() ? left : right;

  Vec2 axis = staged("axis estimation", [&] {
    return estimate_axis(larger, config.min_axis_ratio);
  });

  // Station budget: at most `stations`, at most 80% of the overlapping
  // axial extent so adjacent scanlines stay decorrelated.
  auto [ox, oy] = left.anchor();
  Vec2 dir = measurement_direction(axis);
  Projected pl = project(left, ox, oy, axis, dir);
  Projected pr = project(right, ox, oy, axis, dir);
  double lo = std::max(pl.tmin, pr.tmin);
  double hi = std::min(pl.tmax, pr.tmax);
  if (hi < lo)
    fail(ErrorCode::Geometry,
         "edge sampling: pad regions do not overlap along the measurement axis");
  int budget = static_cast<int>(std::floor(0.8 * (hi - lo + 1.0)));
  int n_req = std::max(1, std::min(config.stations, budget));

  EdgeSamples samples = staged("edge sampling", [&] {
    return sample_edge_pairs(left, right, axis, n_req);
  });

  GapEstimate gap = staged("gap averaging", [&] {
    return mean_gap_pixels(samples.samples, config.trim);
  });

  double ph_px = staged("pad height", [&] {
    return pad_height_pixels(larger, axis);
  });

  MeasurementResult result;
  result.gap_px = gap.gap_px;
  result.pad_height_px = ph_px;
  result.pad_height_mm = pad_height_mm;
  result.scale_mm_per_px = pad_height_mm / ph_px;
  result.diameter_mm = result.gap_px * result.pad_height_mm / result.pad_height_px;
  result.samples_used = gap.samples_used;
  result.samples_trimmed = gap.samples_trimmed;
  result.stations_reduced = samples.stations_reduced;
  return result;
}

}  // namespace tg
