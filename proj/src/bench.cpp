#include "corrstate/bench.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "corrstate/indicators.hpp"
#include "corrstate/io.hpp"
#include "corrstate/reference.hpp"
#include "corrstate/scenario.hpp"

namespace corrstate {

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

// Best-of-reps wall time for one full sweep, in ms. The consumed value
// guards against the whole computation being optimized out.
template <typename Fn>
double time_sweep(int reps, double& sink, Fn&& fn) {
  double best = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const double start = now_ms();
    sink += fn();
    const double elapsed = now_ms() - start;
    if (rep == 0 || elapsed < best) best = elapsed;
  }
  return best;
}

}  // namespace

std::vector<BenchRow> run_bench(std::span<const int> sizes, const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  double sink = 0.0;

  for (int n : sizes) {
    SyntheticSpec spec;
    spec.n_base = n;
    spec.t_max = opts.t_max;
    spec.seed = opts.seed + static_cast<std::uint64_t>(n);
    spec.base_correlation = 0.2;
    spec.coupled_count = 0;
    const Dataset dataset = generate_synthetic(spec).first;

    const auto [first_t, last_t] = analysis_range(dataset, opts.spec);
    const int steps = last_t - first_t + 1;

    BenchRow row;
    row.n = n;
    row.k = opts.spec.k;
    row.steps = steps;
    row.reps = opts.reps;

    SweepOptions rolling;
    rolling.corr = opts.corr;
    rolling.rolling = true;
    rolling.reinit_interval = opts.reinit_interval;
    row.rolling_ms_per_step = time_sweep(opts.reps, sink, [&] {
      return indicator_series(dataset, opts.spec, rolling).g_total;
    }) / steps;

    SweepOptions blocked = rolling;
    blocked.rolling = false;
    blocked.block_size = opts.block_size;
    row.blocked_ms_per_step = time_sweep(opts.reps, sink, [&] {
      return indicator_series(dataset, opts.spec, blocked).g_total;
    }) / steps;

    row.naive_ms_per_step = time_sweep(opts.reps, sink, [&] {
      double total = 0.0;
      for (int t = first_t; t <= last_t; ++t) {
        const CorrelationMatrix corr = correlation_at(dataset, t, opts.spec, opts.corr);
        for (double g : express_indicator(corr)) total += g;
      }
      return total;
    }) / steps;

    row.reference_ms_per_step = time_sweep(opts.reps, sink, [&] {
      return reference::indicator_series_serial(dataset, opts.spec, opts.corr).g_total;
    }) / steps;

    row.speedup_vs_naive =
        row.rolling_ms_per_step > 0.0 ? row.naive_ms_per_step / row.rolling_ms_per_step : 0.0;
    rows.push_back(row);
  }
  (void)sink;
  return rows;
}

std::string bench_table(std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << "  n     k  steps  rolling ms/step  blocked ms/step  naive ms/step  serial-ref ms/step  naive/rolling\n";
  for (const auto& row : rows) {
    out << std::setw(5) << row.n << ' ' << std::setw(5) << row.k << ' ' << std::setw(6)
        << row.steps << "  " << std::setw(15) << std::fixed << std::setprecision(4)
        << row.rolling_ms_per_step << "  " << std::setw(15) << row.blocked_ms_per_step << "  "
        << std::setw(13) << row.naive_ms_per_step << "  " << std::setw(18)
        << row.reference_ms_per_step << "  " << std::setw(13) << std::setprecision(2)
        << row.speedup_vs_naive << '\n';
  }
  return out.str();
}

void write_bench_csv(std::span<const BenchRow> rows, const BenchOptions& opts,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "' for writing");
  }
  out << "# format_version " << kFormatVersion << "\n";
  out << "# wall-clock timings; thresholds and speedups are hardware-dependent\n";
  out << "# config: mode=" << mode_name(opts.corr.mode) << " threads="
      << resolve_threads(opts.corr.threads) << " block_size=" << opts.block_size
      << " reinit_interval=" << opts.reinit_interval << " seed=" << opts.seed << "\n";
  out << "n,k,steps,reps,rolling_ms_per_step,blocked_ms_per_step,naive_ms_per_step,"
         "reference_ms_per_step,speedup_vs_naive\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.k << ',' << row.steps << ',' << row.reps << ','
        << format_double(row.rolling_ms_per_step) << ',' << format_double(row.blocked_ms_per_step)
        << ',' << format_double(row.naive_ms_per_step) << ','
        << format_double(row.reference_ms_per_step) << ','
        << format_double(row.speedup_vs_naive) << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::kIoError, "write failed for '" + path.string() + "'");
  }
}

}  // namespace corrstate
