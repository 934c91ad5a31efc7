#include "corrstate/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace corrstate {

ConfigEcho make_echo(WindowSpec spec, const SweepOptions& opts) {
  ConfigEcho echo;
  echo.k = spec.k;
  echo.mode = opts.corr.mode;
  echo.variance_threshold = opts.corr.variance_eps;
  echo.block_size = opts.block_size;
  echo.reinit_interval = opts.reinit_interval;
  echo.threads = resolve_threads(opts.corr.threads);
  echo.rolling = opts.rolling;
  return echo;
}

SeriesReport make_series_report(std::string label, const IndicatorSeries& series) {
  SeriesReport report;
  report.label = std::move(label);
  report.g_total = series.g_total;
  report.g_step = series.g_step;
  report.inactive_counts = series.inactive_counts;
  return report;
}

Dataset apply_strategy(const Dataset& base, const Strategy& strategy) {
  const int t_max = base.t_max();

  std::vector<ParameterMeta> meta = base.parameters();
  std::vector<double> values = base.raw_values();  // column-major copy

  for (const auto& scale : strategy.scale_factors) {
    const int col = base.column_index(scale.parameter_id);
    if (col < 0) {
      throw Error(ErrorKind::kUnknownParameter,
                  "scale target '" + scale.parameter_id + "' not in base dataset");
    }
    if (!(scale.factor > 0.0) || !std::isfinite(scale.factor)) {
      throw Error(ErrorKind::kInvalidSpec,
                  "scale factor for '" + scale.parameter_id + "' must be positive and finite");
    }
    double* col_values = values.data() + static_cast<size_t>(col) * t_max;
    for (int t = 0; t < t_max; ++t) col_values[t] *= scale.factor;
  }

  for (const auto& ov : strategy.overrides) {
    const int col = base.column_index(ov.parameter_id);
    if (col < 0) {
      throw Error(ErrorKind::kUnknownParameter,
                  "override target '" + ov.parameter_id + "' not in base dataset");
    }
    if (ov.t < 1 || ov.t > t_max) {
      throw Error(ErrorKind::kOutOfRange,
                  "override for '" + ov.parameter_id + "' at t=" + std::to_string(ov.t) +
                      " outside 1.." + std::to_string(t_max));
    }
    if (!std::isfinite(ov.value)) {
      throw Error(ErrorKind::kInvalidSpec,
                  "override for '" + ov.parameter_id + "' is not finite");
    }
    values[static_cast<size_t>(col) * t_max + (ov.t - 1)] = ov.value;
  }

  std::unordered_set<std::string> base_ids;
  for (const auto& m : meta) base_ids.insert(m.id);

  for (const auto& added : strategy.added_parameters) {
    if (static_cast<int>(added.values.size()) != t_max) {
      throw Error(ErrorKind::kLengthMismatch,
                  "added parameter '" + added.meta.id + "' has " +
                      std::to_string(added.values.size()) + " values, expected " +
                      std::to_string(t_max));
    }
    if (base_ids.count(added.meta.id) != 0) {
      throw Error(ErrorKind::kInvalidSpec,
                  "added parameter id '" + added.meta.id + "' already exists in base");
    }
    base_ids.insert(added.meta.id);
    meta.push_back(added.meta);
    values.insert(values.end(), added.values.begin(), added.values.end());
  }

  return Dataset(std::move(meta), t_max, std::move(values));
}

namespace {

/// Deterministic normal draws: mt19937_64 bit stream mapped to (0,1]
/// uniforms, paired through the basic Box-Muller transform. Kept explicit
/// (instead of std::normal_distribution) because the standard leaves the
/// normal distribution's algorithm unspecified, which would make generated
/// corpora implementation-dependent.
class SeededNormal {
 public:
  explicit SeededNormal(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_index(std::uint64_t bound) { return rng_() % bound; }

 private:
  double uniform_open() {
    // (0, 1]: never 0, so log() stays finite.
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::string padded_id(const char* prefix, int index) {
  std::string digits = std::to_string(index + 1);
  while (digits.size() < 3) digits.insert(digits.begin(), '0');
  return std::string(prefix) + digits;
}

}  // namespace

std::pair<Dataset, Strategy> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_base < 1 || spec.t_max < 1) {
    throw Error(ErrorKind::kInvalidSpec, "n_base and t_max must be positive");
  }
  if (!(spec.base_correlation >= 0.0) || !(spec.base_correlation < 1.0)) {
    throw Error(ErrorKind::kInvalidSpec, "base_correlation must be in [0, 1)");
  }
  if (spec.coupled_count < 0) {
    throw Error(ErrorKind::kInvalidSpec, "coupled_count must be >= 0");
  }
  if (!(spec.coupling >= 0.0) || !(spec.coupling <= 1.0)) {
    throw Error(ErrorKind::kInvalidSpec, "coupling must be in [0, 1]");
  }

  SeededNormal gen(spec.seed);
  const int t_max = spec.t_max;
  const int n = spec.n_base;
  const double w = std::sqrt(spec.base_correlation);
  const double noise_w = std::sqrt(1.0 - spec.base_correlation);

  // Draw order is fixed: factor series, then base columns, then per added
  // column its sources, mixture noise. Changing the order would silently
  // change every seeded corpus.
  std::vector<double> factor(t_max);
  for (int t = 0; t < t_max; ++t) factor[t] = gen.next();

  std::vector<ParameterMeta> meta(n);
  std::vector<double> values(static_cast<size_t>(n) * t_max);
  for (int j = 0; j < n; ++j) {
    meta[j].id = padded_id("p", j);
    meta[j].name = "base parameter " + std::to_string(j + 1);
    meta[j].space = (j % 5 == 4) ? ParameterSpace::kEnvironment : ParameterSpace::kActual;
    meta[j].units = "cu";
    double* col = values.data() + static_cast<size_t>(j) * t_max;
    for (int t = 0; t < t_max; ++t) {
      col[t] = w * factor[t] + noise_w * gen.next();
    }
  }
  Dataset base(std::move(meta), t_max, std::move(values));

  Strategy strategy;
  strategy.id = "coupled";
  for (int c = 0; c < spec.coupled_count; ++c) {
    const int max_sources = std::min(3, n);
    const int n_sources = 1 + static_cast<int>(gen.next_index(max_sources));
    std::vector<int> sources;
    while (static_cast<int>(sources.size()) < n_sources) {
      const int pick = static_cast<int>(gen.next_index(n));
      if (std::find(sources.begin(), sources.end(), pick) == sources.end()) {
        sources.push_back(pick);
      }
    }

    AddedParameter added;
    added.meta.id = padded_id("s", c);
    added.meta.name = "strategy parameter " + std::to_string(c + 1);
    added.meta.space = ParameterSpace::kControl;
    added.meta.units = "cu";
    added.values.resize(t_max);
    for (int t = 0; t < t_max; ++t) {
      double mix = 0.0;
      for (int s : sources) mix += base.value(t + 1, s);
      mix /= n_sources;
      added.values[t] = spec.coupling * mix + (1.0 - spec.coupling) * gen.next();
    }
    strategy.added_parameters.push_back(std::move(added));
  }

  return {std::move(base), std::move(strategy)};
}

ComparisonReport run_comparison(const Dataset& base, const Strategy& strategy,
                                WindowSpec spec, const SweepOptions& opts,
                                const std::string& method_label) {
  const Dataset with_strategy = apply_strategy(base, strategy);

  const IndicatorSeries base_series = indicator_series(base, spec, opts);
  const IndicatorSeries strategy_series = indicator_series(with_strategy, spec, opts);
  const ComparisonResult delta = compare_strategies(base_series, strategy_series);

  ComparisonReport report;
  report.config = make_echo(spec, opts);
  report.config.method_label = method_label;
  report.first_t = base_series.first_t;
  report.last_t = base_series.last_t;
  report.series.push_back(make_series_report("base", base_series));
  report.series.push_back(
      make_series_report(strategy.id.empty() ? "strategy" : strategy.id, strategy_series));
  report.delta_total = delta.delta_total;
  report.delta_step = delta.delta_step;
  return report;
}

}  // namespace corrstate
