#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/error.hpp"

namespace tg {

/// Absolute-error statistics between paired measurement lists.
/// Std uses the n-1 denominator (0 when n == 1).
struct ErrorStats {
  double mean_abs = 0.0;
  double std_abs = 0.0;
  double max_abs = 0.0;
  std::size_t count = 0;

  /// Fraction of errors strictly below threshold.
  double fraction_below(double threshold) const;

  const std::vector<double>& sorted_errors() const { return sorted_; }

  friend ErrorStats error_stats(const std::vector<double>& measured,
                                const std::vector<double>& reference);

private:
  std::vector<double> sorted_;  // ascending absolute errors
};

ErrorStats error_stats(const std::vector<double>& measured,
                       const std::vector<double>& reference);

/// Half-open bins [k*w, (k+1)*w) starting at zero. Empty input gives an
/// empty histogram. Inputs must be non-negative.
struct Histogram {
  double bin_width = 0.0;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
  double lower_edge(std::size_t bin) const { return bin * bin_width; }
};

Histogram error_histogram(const std::vector<double>& errors, double bin_width);

/// One measurement round's stats, tagged with its original position.
struct RoundStats {
  int round_index = 0;
  ErrorStats stats;
};

/// Per-round stats sorted by descending mean (descending std on ties,
/// stable beyond that).
std::vector<RoundStats> round_summary(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        rounds);

/// Mean and sample std of per-image |matched - crossed| differences.
struct ConditionDiff {
  double mean_abs = 0.0;
  double std_abs = 0.0;
  std::size_t count = 0;
};

ConditionDiff cross_condition_compare(const std::vector<double>& diam_matched,
                                      const std::vector<double>& diam_crossed);

}  // namespace tg
