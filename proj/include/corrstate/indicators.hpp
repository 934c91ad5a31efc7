#pragma once

#include <span>
#include <vector>

#include "corrstate/correlation.hpp"
#include "corrstate/dataset.hpp"

namespace corrstate {

/// Per-step express indicators G_i(t) = sum_j |r_ij(t)| for every analyzable
/// t, their per-step totals G(t), and the whole-run total G.
struct IndicatorSeries {
  int k = 0;
  Mode mode = Mode::kPearson;
  int n = 0;
  int first_t = 0;
  int last_t = 0;
  std::vector<double> g_rows;        // steps x n, row-major
  std::vector<double> g_step;        // G(t) per step
  std::vector<int> inactive_counts;  // variance-inactive columns per step
  double g_total = 0.0;

  int steps() const { return last_t - first_t + 1; }
  std::span<const double> rows_at(int t) const {
    return {g_rows.data() + static_cast<size_t>(t - first_t) * n, static_cast<size_t>(n)};
  }
  double step_at(int t) const { return g_step[t - first_t]; }
};

struct SweepOptions {
  CorrOptions corr;
  bool rolling = true;  // false = per-step batch recomputation
  int block_size = kDefaultBlockSize;
  int reinit_interval = kDefaultReinitInterval;
};

/// Row sums of absolute values, diagonal included.
std::vector<double> express_indicator(const CorrelationMatrix& corr);

IndicatorSeries indicator_series(const Dataset& dataset, WindowSpec spec,
                                 const SweepOptions& opts = {});

struct ComparisonResult {
  double delta_total = 0.0;  // base minus alternative
  int first_t = 0;
  std::vector<double> delta_step;
};

/// Delta between two runs, base-minus-alternative. Both series must have
/// been computed with the same k, mode, and time range.
ComparisonResult compare_strategies(const IndicatorSeries& base,
                                    const IndicatorSeries& other);

}  // namespace corrstate
