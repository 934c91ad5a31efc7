#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrstate/error.hpp"

namespace corrstate {

enum class ParameterSpace { kActual, kControl, kEnvironment };

const char* space_name(ParameterSpace space);
ParameterSpace parse_space(std::string_view text);

struct ParameterMeta {
  std::string id;     // unique within a dataset, non-empty
  std::string name;   // human-readable label
  ParameterSpace space = ParameterSpace::kActual;
  std::string units;  // free-form, e.g. currency units
};

/// Immutable T x n value table with per-column metadata.
///
/// Time steps are 1-based (t = 1..t_max) to match the on-disk format.
/// Values are stored column-major so the window of a single column is a
/// contiguous span; all analysis code iterates columns, not rows.
class Dataset {
 public:
  Dataset(std::vector<ParameterMeta> meta, int t_max, std::vector<double> column_major);

  static Dataset from_rows(std::vector<ParameterMeta> meta,
                           const std::vector<std::vector<double>>& rows);

  int t_max() const { return t_max_; }
  int n() const { return static_cast<int>(meta_.size()); }

  double value(int t, int col) const {
    return values_[static_cast<size_t>(col) * t_max_ + (t - 1)];
  }

  std::span<const double> column(int col) const {
    return {values_.data() + static_cast<size_t>(col) * t_max_,
            static_cast<size_t>(t_max_)};
  }

  // Contiguous view of column `col` over rows t-k .. t-1 (the analysis
  // window for step t). Bounds are the caller's responsibility.
  std::span<const double> window_column(int t, int k, int col) const {
    return {values_.data() + static_cast<size_t>(col) * t_max_ + (t - 1 - k),
            static_cast<size_t>(k)};
  }

  void copy_row(int t, std::span<double> out) const;

  const ParameterMeta& parameter(int col) const { return meta_[col]; }
  const std::vector<ParameterMeta>& parameters() const { return meta_; }
  int column_index(std::string_view id) const;  // -1 when absent

  const std::vector<double>& raw_values() const { return values_; }

 private:
  std::vector<ParameterMeta> meta_;
  int t_max_ = 0;
  std::vector<double> values_;  // column-major: [col * t_max + (t-1)]
};

/// Window length for the sliding correlation estimate. k >= 2 because the
/// sample correlation divides by k-1; k <= t_max-1 because the window at
/// step t covers rows t-k..t-1 only (the current row is excluded).
struct WindowSpec {
  int k = 6;
};

void check_spec(const Dataset& dataset, WindowSpec spec);

/// First and last analyzable time step: (k+1, t_max).
std::pair<int, int> analysis_range(const Dataset& dataset, WindowSpec spec);

/// The k x n window matrix at step t, rows ordered most recent first:
/// row 0 is x(t-1), row 1 is x(t-2), ..., row k-1 is x(t-k).
std::vector<std::vector<double>> window_slice(const Dataset& dataset, int t, WindowSpec spec);

}  // namespace corrstate
