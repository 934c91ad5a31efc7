#include "corrstate/dataset.hpp"

#include <cmath>
#include <unordered_set>

namespace corrstate {

const char* space_name(ParameterSpace space) {
  switch (space) {
    case ParameterSpace::kActual: return "actual";
    case ParameterSpace::kControl: return "control";
    case ParameterSpace::kEnvironment: return "environment";
  }
  return "actual";
}

ParameterSpace parse_space(std::string_view text) {
  if (text == "actual") return ParameterSpace::kActual;
  if (text == "control") return ParameterSpace::kControl;
  if (text == "environment") return ParameterSpace::kEnvironment;
  throw Error(ErrorKind::kSchemaError,
              "unknown parameter space '" + std::string(text) +
                  "' (expected actual|control|environment)");
}

Dataset::Dataset(std::vector<ParameterMeta> meta, int t_max, std::vector<double> column_major)
    : meta_(std::move(meta)), t_max_(t_max), values_(std::move(column_major)) {
  if (meta_.empty() || t_max_ <= 0) {
    throw Error(ErrorKind::kEmptyData, "dataset needs at least one parameter and one time step");
  }
  if (values_.size() != meta_.size() * static_cast<size_t>(t_max_)) {
    throw Error(ErrorKind::kLengthMismatch,
                "value table size does not match t_max x n");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& m : meta_) {
    if (m.id.empty()) {
      throw Error(ErrorKind::kSchemaError, "parameter with empty id");
    }
    if (!seen.insert(m.id).second) {
      throw Error(ErrorKind::kSchemaError, "duplicate parameter id '" + m.id + "'");
    }
  }
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      const int col = static_cast<int>(i / t_max_);
      const int t = static_cast<int>(i % t_max_) + 1;
      throw Error(ErrorKind::kInvalidSpec,
                  "non-finite value in column '" + meta_[col].id + "' at t=" +
                      std::to_string(t));
    }
  }
}

Dataset Dataset::from_rows(std::vector<ParameterMeta> meta,
                           const std::vector<std::vector<double>>& rows) {
  if (meta.empty() || rows.empty()) {
    throw Error(ErrorKind::kEmptyData, "dataset needs at least one parameter and one time step");
  }
  const size_t n = meta.size();
  const size_t t_max = rows.size();
  std::vector<double> values(n * t_max);
  for (size_t t = 0; t < t_max; ++t) {
    if (rows[t].size() != n) {
      throw Error(ErrorKind::kLengthMismatch,
                  "row " + std::to_string(t + 1) + " has " + std::to_string(rows[t].size()) +
                      " values, expected " + std::to_string(n));
    }
    for (size_t j = 0; j < n; ++j) {
      values[j * t_max + t] = rows[t][j];
    }
  }
  return Dataset(std::move(meta), static_cast<int>(t_max), std::move(values));
}

void Dataset::copy_row(int t, std::span<double> out) const {
  for (int j = 0; j < n(); ++j) {
    out[j] = value(t, j);
  }
}

int Dataset::column_index(std::string_view id) const {
  for (size_t j = 0; j < meta_.size(); ++j) {
    if (meta_[j].id == id) return static_cast<int>(j);
  }
  return -1;
}

void check_spec(const Dataset& dataset, WindowSpec spec) {
  if (spec.k < 2) {
    throw Error(ErrorKind::kInvalidSpec,
                "window length k must be >= 2, got " + std::to_string(spec.k));
  }
  if (dataset.t_max() < spec.k + 1) {
    throw Error(ErrorKind::kInsufficientData,
                "t_max=" + std::to_string(dataset.t_max()) + " leaves no analyzable step for k=" +
                    std::to_string(spec.k) + " (need t_max >= k+1)");
  }
}

std::pair<int, int> analysis_range(const Dataset& dataset, WindowSpec spec) {
  check_spec(dataset, spec);
  return {spec.k + 1, dataset.t_max()};
}

std::vector<std::vector<double>> window_slice(const Dataset& dataset, int t, WindowSpec spec) {
  if (spec.k < 2) {
    throw Error(ErrorKind::kInvalidSpec,
                "window length k must be >= 2, got " + std::to_string(spec.k));
  }
  if (t < spec.k + 1 || t > dataset.t_max()) {
    throw Error(ErrorKind::kOutOfRange,
                "t=" + std::to_string(t) + " outside analyzable range [" +
                    std::to_string(spec.k + 1) + ", " + std::to_string(dataset.t_max()) + "]");
  }
  std::vector<std::vector<double>> rows(spec.k, std::vector<double>(dataset.n()));
  for (int l = 1; l <= spec.k; ++l) {
    for (int j = 0; j < dataset.n(); ++j) {
      rows[l - 1][j] = dataset.value(t - l, j);
    }
  }
  return rows;
}

}  // namespace corrstate
