#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

namespace tg {

double ErrorStats::fraction_below(double threshold) const {
  if (sorted_.empty()) return 0.0;
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), threshold);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

ErrorStats error_stats(const std::vector<double>& measured,
                       const std::vector<double>& reference) {
  if (measured.size() != reference.size())
    fail(ErrorCode::InvalidArgument,
         "error_stats: measured and reference lengths differ");
  if (measured.empty())
    fail(ErrorCode::InvalidArgument, "error_stats: empty input");

  std::size_t n = measured.size();
  ErrorStats out;
  out.count = n;
  out.sorted_.reserve(n);

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = std::fabs(measured[i] - reference[i]);
    out.sorted_.push_back(e);
    sum += e;
    if (e > out.max_abs) out.max_abs = e;
  }
  out.mean_abs = sum / static_cast<double>(n);

  if (n > 1) {
    double ss = 0.0;
    for (double e : out.sorted_) {
      double d = e - out.mean_abs;
      ss += d * d;
    }
    out.std_abs = std::sqrt(ss / static_cast<double>(n - 1));
  }

  std::sort(out.sorted_.begin(), out.sorted_.end());
  return out;
}

std::int64_t Histogram::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts) t += c;
  return t;
}

Histogram error_histogram(const std::vector<double>& errors, double bin_width) {
  if (!(bin_width > 0.0))
    fail(ErrorCode::InvalidArgument, "error_histogram: bin width must be > 0");

  Histogram h;
  h.bin_width = bin_width;
  for (double e : errors) {
    if (e < 0.0 || !std::isfinite(e))
      fail(ErrorCode::InvalidArgument,
           "error_histogram: errors must be finite and non-negative");
    auto bin = static_cast<std::size_t>(std::floor(e / bin_width));
    if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
  }
  return h;
}

std::vector<RoundStats> round_summary(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        rounds) {
  std::vector<RoundStats> out;
  out.reserve(rounds.size());
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    RoundStats r;
    r.round_index = static_cast<int>(i);
    r.stats = error_stats(rounds[i].first, rounds[i].second);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RoundStats& a, const RoundStats& b) {
                     if (a.stats.mean_abs != b.stats.mean_abs)
                       return a.stats.mean_abs > b.stats.mean_abs;
                     return a.stats.std_abs > b.stats.std_abs;
                   });
  return out;
}

ConditionDiff cross_condition_compare(const std::vector<double>& diam_matched,
                                      const std::vector<double>& diam_crossed) {
  ErrorStats s = error_stats(diam_matched, diam_crossed);
  return {s.mean_abs, s.std_abs, s.count};
}

}  // namespace tg
