#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "corrstate/correlation.hpp"
#include "corrstate/dataset.hpp"

namespace corrstate {

struct BenchRow {
  int n = 0;
  int k = 0;
  int steps = 0;
  int reps = 0;
  double rolling_ms_per_step = 0.0;    // incremental moments sweep
  double blocked_ms_per_step = 0.0;    // per-step blocked recomputation
  double naive_ms_per_step = 0.0;      // per-step full-matrix recomputation
  double reference_ms_per_step = 0.0;  // serial textbook loops
  double speedup_vs_naive = 0.0;       // naive / rolling
};

struct BenchOptions {
  int t_max = 60;
  WindowSpec spec{6};
  CorrOptions corr{};
  int block_size = kDefaultBlockSize;
  int reinit_interval = kDefaultReinitInterval;
  int reps = 3;  // best-of
  std::uint64_t seed = 99;
};

/// Times the rolling sweep against per-step recomputation on synthetic
/// datasets of the given widths. "naive" recomputes and materializes the
/// full correlation matrix at every step; "blocked" is the matrix-free
/// batch path. Wall-clock numbers, so hardware-dependent by nature.
std::vector<BenchRow> run_bench(std::span<const int> sizes, const BenchOptions& opts = {});

std::string bench_table(std::span<const BenchRow> rows);
void write_bench_csv(std::span<const BenchRow> rows, const BenchOptions& opts,
                     const std::filesystem::path& path);

}  // namespace corrstate
