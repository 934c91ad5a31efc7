#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "corrstate/bench.hpp"
#include "corrstate/indicators.hpp"
#include "corrstate/io.hpp"
#include "corrstate/scenario.hpp"
#include "corrstate/version.hpp"

namespace fs = std::filesystem;
using namespace corrstate;

namespace {

// Exit contract: 0 success, 1 internal error, 2 user/data error.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

struct CliConfig {
  int k = 6;
  std::string mode = "pearson";
  double variance_threshold = kDefaultVarianceEps;
  int block_size = kDefaultBlockSize;
  int reinit_interval = kDefaultReinitInterval;
  int threads = 0;
  bool no_rolling = false;
  bool fill_zero = false;
  std::string method_label;
  std::string out_dir = ".";
  std::optional<unsigned long long> seed;

  WindowSpec spec() const { return WindowSpec{k}; }

  SweepOptions sweep() const {
    SweepOptions opts;
    opts.corr.mode = parse_mode(mode);
    opts.corr.variance_eps = variance_threshold;
    opts.corr.threads = threads;
    opts.rolling = !no_rolling;
    opts.block_size = block_size;
    opts.reinit_interval = reinit_interval;
    return opts;
  }

  ConfigEcho echo() const {
    ConfigEcho e = make_echo(spec(), sweep());
    e.method_label = method_label;
    e.seed = seed;
    return e;
  }
};

fs::path prepare_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIoError, "cannot create output directory '" + out_dir + "'");
  }
  return dir;
}

int cmd_validate(const CliConfig& cfg, const std::string& data, const std::string& meta) {
  const Dataset dataset = load_csv(data, meta, {cfg.fill_zero});
  const ValidationSummary summary = validate(dataset, cfg.spec(), cfg.variance_threshold);
  std::cout << to_text(summary);
  return summary.analyzable() ? kExitOk : kExitUser;
}

int cmd_compute(const CliConfig& cfg, const std::string& data, const std::string& meta) {
  const Dataset dataset = load_csv(data, meta, {cfg.fill_zero});
  const IndicatorSeries series = indicator_series(dataset, cfg.spec(), cfg.sweep());

  ComparisonReport report;
  report.config = cfg.echo();
  report.first_t = series.first_t;
  report.last_t = series.last_t;
  report.series.push_back(make_series_report("dataset", series));

  const fs::path dir = prepare_out_dir(cfg.out_dir);
  write_report(report, dir / "report.json");
  write_series_csv(series, "dataset", dir / "series.csv");

  std::cout << "steps: " << series.steps() << " (t " << series.first_t << ".."
            << series.last_t << ")\n";
  std::cout << "g_total: " << format_double(series.g_total) << "\n";
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  std::cout << "series: " << (dir / "series.csv").string() << "\n";
  return kExitOk;
}

int cmd_compare(const CliConfig& cfg, const std::string& base_data, const std::string& base_meta,
                const std::string& strategy_data, const std::string& strategy_meta,
                const std::string& strategy_def) {
  const Dataset base = load_csv(base_data, base_meta, {cfg.fill_zero});
  const fs::path dir = prepare_out_dir(cfg.out_dir);

  ComparisonReport report;
  if (!strategy_def.empty()) {
    const Strategy strategy = load_strategy(strategy_def);
    report = run_comparison(base, strategy, cfg.spec(), cfg.sweep(), cfg.method_label);
    report.config.seed = cfg.seed;
  } else {
    const Dataset other = load_csv(strategy_data, strategy_meta, {cfg.fill_zero});
    const IndicatorSeries base_series = indicator_series(base, cfg.spec(), cfg.sweep());
    const IndicatorSeries other_series = indicator_series(other, cfg.spec(), cfg.sweep());
    const ComparisonResult delta = compare_strategies(base_series, other_series);

    report.config = cfg.echo();
    report.first_t = base_series.first_t;
    report.last_t = base_series.last_t;
    report.series.push_back(make_series_report("base", base_series));
    report.series.push_back(make_series_report("strategy", other_series));
    report.delta_total = delta.delta_total;
    report.delta_step = delta.delta_step;
  }

  write_report(report, dir / "comparison.json");

  // Rebuild light-weight series objects for the plot CSV.
  IndicatorSeries a, b;
  a.first_t = b.first_t = report.first_t;
  a.last_t = b.last_t = report.last_t;
  a.g_step = report.series[0].g_step;
  b.g_step = report.series[1].g_step;
  write_series_csv(a, report.series[0].label, b, report.series[1].label, dir / "series.csv");

  std::cout << "g_total[" << report.series[0].label
            << "]: " << format_double(report.series[0].g_total) << "\n";
  std::cout << "g_total[" << report.series[1].label
            << "]: " << format_double(report.series[1].g_total) << "\n";
  std::cout << "delta_total: " << format_double(*report.delta_total) << "\n";
  std::cout << "report: " << (dir / "comparison.json").string() << "\n";
  std::cout << "series: " << (dir / "series.csv").string() << "\n";
  return kExitOk;
}

int cmd_generate(const CliConfig& cfg, const std::string& spec_path) {
  SyntheticSpec spec = load_synthetic_spec(spec_path);
  if (cfg.seed.has_value()) spec.seed = *cfg.seed;

  const auto [base, strategy] = generate_synthetic(spec);
  const fs::path dir = prepare_out_dir(cfg.out_dir);

  write_dataset_csv(base, dir / "base.csv", dir / "base_meta.json");
  write_strategy(strategy, dir / "strategy.json");
  write_synthetic_spec(spec, dir / "generated_spec.json");  // effective config echo

  std::cout << "dataset: " << (dir / "base.csv").string() << "\n";
  std::cout << "metadata: " << (dir / "base_meta.json").string() << "\n";
  std::cout << "strategy: " << (dir / "strategy.json").string() << "\n";
  std::cout << "spec echo: " << (dir / "generated_spec.json").string() << "\n";
  return kExitOk;
}

int cmd_bench(const CliConfig& cfg, const std::vector<int>& sizes, int t_max, int reps) {
  BenchOptions opts;
  opts.t_max = t_max;
  opts.spec = cfg.spec();
  opts.corr.mode = parse_mode(cfg.mode);
  opts.corr.variance_eps = cfg.variance_threshold;
  opts.corr.threads = cfg.threads;
  opts.block_size = cfg.block_size;
  opts.reinit_interval = cfg.reinit_interval;
  opts.reps = reps;
  if (cfg.seed.has_value()) opts.seed = *cfg.seed;

  const std::vector<BenchRow> rows = run_bench(sizes, opts);
  std::cout << bench_table(rows);
  std::cout << "(wall-clock per step; ratios are hardware-dependent)\n";

  const fs::path dir = prepare_out_dir(cfg.out_dir);
  write_bench_csv(rows, opts, dir / "bench.csv");
  std::cout << "bench csv: " << (dir / "bench.csv").string() << "\n";

  for (const auto& row : rows) {
    if (row.n >= 100 && row.rolling_ms_per_step > row.naive_ms_per_step) {
      std::cerr << "bench check failed: rolling slower than naive recomputation at n=" << row.n
                << " (" << row.rolling_ms_per_step << " vs " << row.naive_ms_per_step
                << " ms/step)\n";
      return kExitInternal;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliding-window correlation analytics: integral state indicators and "
               "strategy comparison"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "read defaults from a config file");
  app.fallthrough();
  app.require_subcommand(1);

  CliConfig cfg;
  unsigned long long seed_value = 0;
  app.add_option("--k", cfg.k, "window length in time steps")->check(CLI::PositiveNumber);
  app.add_option("--mode", cfg.mode, "correlation mode: pearson|raw-moment");
  app.add_option("--variance-threshold", cfg.variance_threshold,
                 "window sample variance below which a column is inactive")
      ->check(CLI::PositiveNumber);
  app.add_option("--block-size", cfg.block_size, "tile width for the matrix-free path")
      ->check(CLI::PositiveNumber);
  app.add_option("--reinit-interval", cfg.reinit_interval,
                 "rolling sums rebuilt from raw data every this many steps (0 = never)");
  app.add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  auto* seed_opt = app.add_option("--seed", seed_value, "generator seed override");
  app.add_flag("--fill-zero", cfg.fill_zero, "treat blank CSV cells as 0");
  app.add_flag("--no-rolling", cfg.no_rolling,
               "recompute every step from scratch instead of rolling updates");
  app.add_option("--method-label", cfg.method_label,
                 "free-text control-method label recorded in reports");
  app.add_option("--out-dir", cfg.out_dir, "directory for output artifacts");

  std::string data, meta;
  auto* validate_cmd = app.add_subcommand("validate", "check a dataset against the window spec");
  validate_cmd->add_option("--data", data, "dataset CSV")->required();
  validate_cmd->add_option("--meta", meta, "metadata sidecar JSON")->required();

  auto* compute_cmd = app.add_subcommand("compute", "compute the indicator series and totals");
  compute_cmd->add_option("--data", data, "dataset CSV")->required();
  compute_cmd->add_option("--meta", meta, "metadata sidecar JSON")->required();

  std::string base_data, base_meta, strategy_data, strategy_meta, strategy_def;
  auto* compare_cmd = app.add_subcommand("compare", "compare a base run against a strategy");
  compare_cmd->add_option("--base", base_data, "base dataset CSV")->required();
  compare_cmd->add_option("--base-meta", base_meta, "base metadata sidecar")->required();
  auto* sd = compare_cmd->add_option("--strategy-data", strategy_data, "strategy dataset CSV");
  compare_cmd->add_option("--strategy-meta", strategy_meta, "strategy metadata sidecar")
      ->needs(sd);
  auto* sdef =
      compare_cmd->add_option("--strategy-def", strategy_def, "strategy definition JSON");
  sdef->excludes(sd);

  std::string spec_path;
  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic dataset and strategy");
  generate_cmd->add_option("--spec", spec_path, "synthetic spec JSON")->required();

  std::vector<int> sizes{100, 300, 1000};
  int bench_t_max = 60;
  int bench_reps = 3;
  auto* bench_cmd =
      app.add_subcommand("bench", "time rolling vs per-step recomputation across widths");
  bench_cmd->add_option("--sizes", sizes, "parameter counts to sweep")->delimiter(',');
  bench_cmd->add_option("--t-max", bench_t_max, "synthetic series length");
  bench_cmd->add_option("--reps", bench_reps, "repetitions (best-of)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUser;
  }

  if (seed_opt->count() > 0) cfg.seed = seed_value;
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  try {
    if (*validate_cmd) return cmd_validate(cfg, data, meta);
    if (*compute_cmd) return cmd_compute(cfg, data, meta);
    if (*compare_cmd) {
      if (strategy_def.empty() && strategy_data.empty()) {
        std::cerr << "error: compare needs --strategy-data or --strategy-def\n";
        return kExitUser;
      }
      if (!strategy_data.empty() && strategy_meta.empty()) {
        std::cerr << "error: --strategy-data needs --strategy-meta\n";
        return kExitUser;
      }
      return cmd_compare(cfg, base_data, base_meta, strategy_data, strategy_meta, strategy_def);
    }
    if (*generate_cmd) return cmd_generate(cfg, spec_path);
    if (*bench_cmd) return cmd_bench(cfg, sizes, bench_t_max, bench_reps);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
