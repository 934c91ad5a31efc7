#include "corrstate/indicators.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrstate {

std::vector<double> express_indicator(const CorrelationMatrix& corr) {
  const int n = corr.n;
  std::vector<double> g(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    const double* row = corr.entries.data() + static_cast<size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::abs(row[j]);
    g[i] = acc;
  }
  return g;
}

IndicatorSeries indicator_series(const Dataset& dataset, WindowSpec spec,
                                 const SweepOptions& opts) {
  const auto [first_t, last_t] = analysis_range(dataset, spec);
  const int n = dataset.n();
  const int steps = last_t - first_t + 1;

  IndicatorSeries series;
  series.k = spec.k;
  series.mode = opts.corr.mode;
  series.n = n;
  series.first_t = first_t;
  series.last_t = last_t;
  series.g_rows.resize(static_cast<size_t>(steps) * n);
  series.g_step.resize(steps);
  series.inactive_counts.resize(steps);

  if (opts.rolling) {
    RollingMoments moments = RollingMoments::init(dataset, spec, opts.reinit_interval);
    std::vector<double> incoming(n);
    for (int t = first_t; t <= last_t; ++t) {
      int inactive = 0;
      std::vector<double> rows = indicator_rows_from_moments(moments, opts.corr, &inactive);
      double* dst = series.g_rows.data() + static_cast<size_t>(t - first_t) * n;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        dst[i] = rows[i];
        total += rows[i];
      }
      series.g_step[t - first_t] = total;
      series.inactive_counts[t - first_t] = inactive;
      if (t < last_t) {
        dataset.copy_row(t, incoming);
        moments.step(incoming);
      }
    }
  } else {
    const int threads = resolve_threads(opts.corr.threads);
    const bool outer_parallel = steps >= threads && threads > 1;
    CorrOptions inner = opts.corr;
    if (outer_parallel) inner.threads = 1;

    // Step values are independent; per-row accumulation order inside the
    // blocked kernel is fixed, so the numbers do not depend on the split.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (outer_parallel)
#endif
    for (int s = 0; s < steps; ++s) {
      const int t = first_t + s;
      int inactive = 0;
      std::vector<double> rows =
          indicator_rows_blocked(dataset, t, spec, inner, opts.block_size, &inactive);
      double* dst = series.g_rows.data() + static_cast<size_t>(s) * n;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        dst[i] = rows[i];
        total += rows[i];
      }
      series.g_step[s] = total;
      series.inactive_counts[s] = inactive;
    }
  }

  // Ordered reduction over t keeps reruns bit-identical.
  double g_total = 0.0;
  for (int s = 0; s < steps; ++s) g_total += series.g_step[s];
  series.g_total = g_total;
  return series;
}

ComparisonResult compare_strategies(const IndicatorSeries& base,
                                    const IndicatorSeries& other) {
  if (base.k != other.k) {
    throw Error(ErrorKind::kConfigMismatch,
                "window length differs: " + std::to_string(base.k) + " vs " +
                    std::to_string(other.k));
  }
  if (base.mode != other.mode) {
    throw Error(ErrorKind::kConfigMismatch,
                std::string("mode differs: ") + mode_name(base.mode) + " vs " +
                    mode_name(other.mode));
  }
  if (base.first_t != other.first_t || base.last_t != other.last_t) {
    throw Error(ErrorKind::kConfigMismatch,
                "time range differs: [" + std::to_string(base.first_t) + ", " +
                    std::to_string(base.last_t) + "] vs [" + std::to_string(other.first_t) +
                    ", " + std::to_string(other.last_t) + "]");
  }

  ComparisonResult result;
  result.first_t = base.first_t;
  result.delta_total = base.g_total - other.g_total;
  result.delta_step.resize(base.g_step.size());
  for (size_t s = 0; s < base.g_step.size(); ++s) {
    result.delta_step[s] = base.g_step[s] - other.g_step[s];
  }
  return result;
}

}  // namespace corrstate
