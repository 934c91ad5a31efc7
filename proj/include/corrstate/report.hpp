#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corrstate/correlation.hpp"
#include "corrstate/indicators.hpp"
#include "corrstate/version.hpp"

namespace corrstate {

/// Effective configuration echoed into every output artifact.
struct ConfigEcho {
  int k = 6;
  Mode mode = Mode::kPearson;
  double variance_threshold = kDefaultVarianceEps;
  int block_size = kDefaultBlockSize;
  int reinit_interval = kDefaultReinitInterval;
  int threads = 1;
  bool rolling = true;
  std::string method_label;
  std::optional<unsigned long long> seed;
  std::string rng = kRngName;
  std::string tool_version = kToolVersion;
};

ConfigEcho make_echo(WindowSpec spec, const SweepOptions& opts);

struct SeriesReport {
  std::string label;
  double g_total = 0.0;
  std::vector<double> g_step;
  std::vector<int> inactive_counts;
};

SeriesReport make_series_report(std::string label, const IndicatorSeries& series);

/// One or two labeled indicator series plus, when two, their delta. The
/// on-disk form is JSON with stable key order; numbers round-trip exactly.
struct ComparisonReport {
  int format_version = kFormatVersion;
  ConfigEcho config;
  int first_t = 0;
  int last_t = 0;
  std::vector<SeriesReport> series;
  std::optional<double> delta_total;  // series[0] minus series[1]
  std::vector<double> delta_step;
};

}  // namespace corrstate
