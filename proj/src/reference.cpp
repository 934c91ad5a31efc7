#include "corrstate/reference.hpp"

#include <cmath>
#include <vector>

namespace corrstate::reference {

CorrelationMatrix correlation_serial(const Dataset& dataset, int t, WindowSpec spec,
                                     const CorrOptions& opts) {
  const auto window = window_slice(dataset, t, spec);  // k rows of n values
  const int k = spec.k;
  const int n = dataset.n();

  std::vector<double> mean(n, 0.0);
  std::vector<double> sd(n, 0.0);
  std::vector<bool> active(n, true);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += window[l][j];
    mean[j] = sum / k;
    double css = 0.0;
    for (int l = 0; l < k; ++l) {
      css += (window[l][j] - mean[j]) * (window[l][j] - mean[j]);
    }
    const double variance = css / (k - 1);
    active[j] = variance >= opts.variance_eps;
    sd[j] = std::sqrt(variance);
  }

  CorrelationMatrix result;
  result.n = n;
  result.t = t;
  result.mode = opts.mode;
  result.entries.assign(static_cast<size_t>(n) * n, 0.0);

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double r = 0.0;
      if (opts.mode == Mode::kPearson) {
        if (i == j) {
          r = active[i] ? 1.0 : 0.0;
        } else if (active[i] && active[j]) {
          double cov = 0.0;
          for (int l = 0; l < k; ++l) {
            cov += (window[l][i] - mean[i]) * (window[l][j] - mean[j]);
          }
          cov /= (k - 1);
          r = cov / (sd[i] * sd[j]);
        }
      } else {
        double sum = 0.0;
        for (int l = 0; l < k; ++l) sum += window[l][i] * window[l][j];
        r = sum / (k - 1);
      }
      result.entries[static_cast<size_t>(i) * n + j] = r;
      result.entries[static_cast<size_t>(j) * n + i] = r;
    }
  }
  return result;
}

std::vector<double> indicator_rows_serial(const Dataset& dataset, int t, WindowSpec spec,
                                          const CorrOptions& opts) {
  const CorrelationMatrix corr = correlation_serial(dataset, t, spec, opts);
  std::vector<double> g(corr.n, 0.0);
  for (int i = 0; i < corr.n; ++i) {
    for (int j = 0; j < corr.n; ++j) g[i] += std::abs(corr.at(i, j));
  }
  return g;
}

IndicatorSeries indicator_series_serial(const Dataset& dataset, WindowSpec spec,
                                        const CorrOptions& opts) {
  const auto [first_t, last_t] = analysis_range(dataset, spec);
  const int n = dataset.n();

  IndicatorSeries series;
  series.k = spec.k;
  series.mode = opts.mode;
  series.n = n;
  series.first_t = first_t;
  series.last_t = last_t;

  for (int t = first_t; t <= last_t; ++t) {
    const auto rows = indicator_rows_serial(dataset, t, spec, opts);
    double total = 0.0;
    for (double v : rows) total += v;
    series.g_rows.insert(series.g_rows.end(), rows.begin(), rows.end());
    series.g_step.push_back(total);

    int inactive = 0;
    for (int j = 0; j < n; ++j) {
      const auto col = dataset.window_column(t, spec.k, j);
      double sum = 0.0;
      for (double v : col) sum += v;
      const double mean = sum / spec.k;
      double css = 0.0;
      for (double v : col) css += (v - mean) * (v - mean);
      if (css / (spec.k - 1) < opts.variance_eps) ++inactive;
    }
    series.inactive_counts.push_back(inactive);
  }

  double g_total = 0.0;
  for (double v : series.g_step) g_total += v;
  series.g_total = g_total;
  return series;
}

}  // namespace corrstate::reference
