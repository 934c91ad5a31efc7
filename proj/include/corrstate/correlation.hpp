#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "corrstate/dataset.hpp"

namespace corrstate {

/// Pearson: per-window mean-centered, scaled by the window sample standard
/// deviation (k-1 denominator) -- the standard sample correlation.
/// RawMoment: the uncentered product-moment sum divided by k-1, kept for
/// literal reproduction of runs that used the raw formula.
enum class Mode { kPearson, kRawMoment };

const char* mode_name(Mode mode);
Mode parse_mode(std::string_view text);

inline constexpr double kDefaultVarianceEps = 1e-12;
inline constexpr int kDefaultBlockSize = 64;
inline constexpr int kDefaultReinitInterval = 256;

struct CorrOptions {
  Mode mode = Mode::kPearson;
  // Absolute threshold on the window sample variance below which a column
  // counts as inactive (Pearson mode zeroes its whole row and column,
  // diagonal included, so dormant parameters contribute nothing).
  double variance_eps = kDefaultVarianceEps;
  int threads = 0;  // 0 = OpenMP default
};

/// Symmetric n x n correlation matrix for one time step.
struct CorrelationMatrix {
  int n = 0;
  int t = 0;
  Mode mode = Mode::kPearson;
  std::vector<double> entries;  // row-major, entries[i*n+j] = r_ij

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
};

CorrelationMatrix correlation_at(const Dataset& dataset, int t, WindowSpec spec,
                                 const CorrOptions& opts = {});

/// Row sums sum_j |r_ij(t)| computed tile-by-tile without materializing the
/// n x n matrix; peak extra memory is the k x n scaled window plus O(n).
/// `inactive_count`, when given, receives the number of variance-inactive
/// columns in the window.
std::vector<double> indicator_rows_blocked(const Dataset& dataset, int t, WindowSpec spec,
                                           const CorrOptions& opts, int block_size,
                                           int* inactive_count = nullptr);

// Packed upper-triangle index (diagonal included): valid for 0 <= i <= j < n.
inline size_t packed_index(int n, int i, int j) {
  const size_t ii = static_cast<size_t>(i);
  return ii * n - ii * (ii - 1) / 2 + (j - i);
}

/// Incremental window sums: per-column sums and per-pair product sums over
/// the current window, updated in O(n^2) per step instead of recomputed in
/// O(k n^2).
///
/// Values are accumulated relative to per-column anchors (the column means
/// of the window at the last rebuild) with Kahan compensation, and the sums
/// are periodically rebuilt from the buffered window rows; together these
/// bound the drift of the add/evict updates.
class RollingMoments {
 public:
  static RollingMoments init(const Dataset& dataset, WindowSpec spec,
                             int reinit_interval = kDefaultReinitInterval);

  /// Slide the window one step forward. After the call the moments describe
  /// step current_t()+1; `incoming` is dataset row (new t)-1, i.e. old
  /// current_t(), and the oldest buffered row is evicted.
  void step(std::span<const double> incoming);

  /// Recompute every sum from the buffered window rows.
  void rebuild();

  int k() const { return k_; }
  int n() const { return n_; }
  int current_t() const { return t_; }

  // Raw-equivalent sums over the current window (anchor shift undone).
  double column_sum(int col) const;
  double squared_sum(int col) const { return pair_product_sum(col, col); }
  double pair_product_sum(int i, int j) const;

  /// The k buffered rows in chronological order (oldest first).
  std::vector<std::vector<double>> window_rows() const;

  // Low-level views used by the correlation and indicator kernels.
  std::span<const double> anchors() const { return anchor_; }
  std::span<const double> shifted_sums() const { return s1_; }
  std::span<const double> shifted_pair_sums() const { return sp_; }

 private:
  RollingMoments() = default;

  // True when a column's window mean has drifted far enough from its anchor
  // to endanger the one-pass variance extraction; step() then re-anchors.
  bool anchors_stale() const;

  int k_ = 0;
  int n_ = 0;
  int t_ = 0;  // the time step the current window belongs to
  int reinit_interval_ = kDefaultReinitInterval;
  int steps_since_rebuild_ = 0;
  int head_ = 0;  // ring index of the oldest row

  std::vector<double> ring_;    // k x n raw rows, row-major ring buffer
  std::vector<double> anchor_;  // per-column shift reference
  std::vector<double> s1_, c1_;  // Kahan sums of shifted values, per column
  std::vector<double> sp_, cp_;  // Kahan sums of shifted pair products, packed
};

RollingMoments rolling_init(const Dataset& dataset, WindowSpec spec,
                            int reinit_interval = kDefaultReinitInterval);

CorrelationMatrix correlation_from_moments(const RollingMoments& moments,
                                           const CorrOptions& opts = {});

/// Row sums sum_j |r_ij| straight from the moments, no matrix materialized.
std::vector<double> indicator_rows_from_moments(const RollingMoments& moments,
                                                const CorrOptions& opts = {},
                                                int* inactive_count = nullptr);

// Shared internals ---------------------------------------------------------

/// Per-step window prepared for dot-product correlation kernels.
/// Pearson: columns centered and scaled to unit norm (inactive columns
/// zeroed) so r_ij = dot(w_i, w_j). RawMoment: raw copies, r_ij =
/// dot(w_i, w_j) / (k-1). Activity flags are variance-based in both modes
/// (diagnostic only under RawMoment).
struct ScaledWindow {
  int k = 0;
  int n = 0;
  int t = 0;
  Mode mode = Mode::kPearson;
  std::vector<double> w;  // column-major, column j at w.data() + j*k
  std::vector<uint8_t> active;
  int inactive_count = 0;

  std::span<const double> col(int j) const {
    return {w.data() + static_cast<size_t>(j) * k, static_cast<size_t>(k)};
  }
};

ScaledWindow build_scaled_window(const Dataset& dataset, int t, WindowSpec spec,
                                 const CorrOptions& opts);

int resolve_threads(int requested);

}  // namespace corrstate
