#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrstate/dataset.hpp"
#include "corrstate/indicators.hpp"
#include "corrstate/report.hpp"
#include "corrstate/scenario.hpp"

namespace corrstate {

struct LoadOptions {
  // Treat blank cells as 0.0 (sparse ledger exports where a blank means "no
  // transaction"). Off by default: silent filling would corrupt the
  // correlation structure, so absent cells are hard errors unless asked for.
  bool fill_zero = false;
};

/// Dataset CSV: optional leading '#' comment lines, then a header row
/// `t,<id>,...`, then rows with consecutive t = 1..t_max and plain decimal
/// numbers. The JSON sidecar maps each id to {name, space, units}; the id
/// sets must match exactly.
Dataset load_csv(const std::filesystem::path& data_path,
                 const std::filesystem::path& meta_path, LoadOptions opts = {});

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& data_path,
                       const std::filesystem::path& meta_path);

struct ColumnActivity {
  std::string id;
  double active_fraction = 0.0;  // share of windows with variance >= threshold
};

struct ValidationSummary {
  int t_max = 0;
  int n = 0;
  int k = 0;
  bool feasible = false;
  int first_t = 0;
  int last_t = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<ColumnActivity> activity;
  std::vector<std::pair<std::string, std::string>> duplicate_columns;
  std::vector<std::string> findings;

  bool analyzable() const { return feasible; }
};

/// Pure diagnostic pass: feasibility of the window length, per-column
/// activity, duplicate columns, value range. Never mutates, never throws on
/// data findings.
ValidationSummary validate(const Dataset& dataset, WindowSpec spec,
                           double variance_eps = kDefaultVarianceEps);

std::string to_text(const ValidationSummary& summary);

void write_report(const ComparisonReport& report, const std::filesystem::path& path);
ComparisonReport read_report(const std::filesystem::path& path);

void write_series_csv(const IndicatorSeries& series, std::string_view label,
                      const std::filesystem::path& path);
void write_series_csv(const IndicatorSeries& a, std::string_view label_a,
                      const IndicatorSeries& b, std::string_view label_b,
                      const std::filesystem::path& path);

struct SeriesCsv {
  std::vector<std::string> labels;
  std::vector<int> t;
  std::vector<std::vector<double>> columns;  // one per label
};

SeriesCsv read_series_csv(const std::filesystem::path& path);

Strategy load_strategy(const std::filesystem::path& path);
void write_strategy(const Strategy& strategy, const std::filesystem::path& path);

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void write_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace corrstate
