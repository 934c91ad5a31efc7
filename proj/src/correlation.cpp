#include "corrstate/correlation.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrstate {

const char* mode_name(Mode mode) {
  return mode == Mode::kPearson ? "pearson" : "raw-moment";
}

Mode parse_mode(std::string_view text) {
  if (text == "pearson") return Mode::kPearson;
  if (text == "raw-moment") return Mode::kRawMoment;
  throw Error(ErrorKind::kInvalidSpec,
              "unknown mode '" + std::string(text) + "' (expected pearson|raw-moment)");
}

int resolve_threads(int requested) {
#ifdef _OPENMP
  if (requested > 0) return requested;
  return omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

ScaledWindow build_scaled_window(const Dataset& dataset, int t, WindowSpec spec,
                                 const CorrOptions& opts) {
  if (spec.k < 2) {
    throw Error(ErrorKind::kInvalidSpec,
                "window length k must be >= 2, got " + std::to_string(spec.k));
  }
  if (t < spec.k + 1 || t > dataset.t_max()) {
    throw Error(ErrorKind::kOutOfRange,
                "t=" + std::to_string(t) + " outside analyzable range [" +
                    std::to_string(spec.k + 1) + ", " + std::to_string(dataset.t_max()) + "]");
  }

  const int k = spec.k;
  const int n = dataset.n();
  ScaledWindow win;
  win.k = k;
  win.n = n;
  win.t = t;
  win.mode = opts.mode;
  win.w.resize(static_cast<size_t>(k) * n);
  win.active.assign(n, 1);

  int inactive = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : inactive) \
    num_threads(resolve_threads(opts.threads))
#endif
  for (int j = 0; j < n; ++j) {
    const auto src = dataset.window_column(t, k, j);
    double* dst = win.w.data() + static_cast<size_t>(j) * k;

    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += src[l];
    const double mean = sum / k;

    double css = 0.0;  // centered sum of squares
    for (int l = 0; l < k; ++l) {
      const double d = src[l] - mean;
      dst[l] = d;
      css += d * d;
    }
    const double variance = css / (k - 1);

    if (opts.mode == Mode::kPearson) {
      if (variance < opts.variance_eps) {
        win.active[j] = 0;
        ++inactive;
        std::fill(dst, dst + k, 0.0);
      } else {
        const double inv_norm = 1.0 / std::sqrt(css);
        for (int l = 0; l < k; ++l) dst[l] *= inv_norm;
      }
    } else {
      // Raw mode keeps the literal values; activity stays as a diagnostic.
      if (variance < opts.variance_eps) {
        win.active[j] = 0;
        ++inactive;
      }
      for (int l = 0; l < k; ++l) dst[l] = src[l];
    }
  }
  win.inactive_count = inactive;
  return win;
}

namespace {

inline double column_dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t l = 0; l < a.size(); ++l) acc += a[l] * b[l];
  return acc;
}

}  // namespace

CorrelationMatrix correlation_at(const Dataset& dataset, int t, WindowSpec spec,
                                 const CorrOptions& opts) {
  const ScaledWindow win = build_scaled_window(dataset, t, spec, opts);
  const int n = win.n;

  CorrelationMatrix result;
  result.n = n;
  result.t = t;
  result.mode = opts.mode;
  result.entries.resize(static_cast<size_t>(n) * n);

  const double k_minus_1 = spec.k - 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 8) num_threads(resolve_threads(opts.threads))
#endif
  for (int i = 0; i < n; ++i) {
    double* row = result.entries.data() + static_cast<size_t>(i) * n;
    if (opts.mode == Mode::kPearson) {
      // Active diagonal is exactly 1 by definition.
      row[i] = win.active[i] ? 1.0 : 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double r = column_dot(win.col(i), win.col(j));
        row[j] = r;
        result.entries[static_cast<size_t>(j) * n + i] = r;
      }
    } else {
      for (int j = i; j < n; ++j) {
        // Literal division: 1/(k-1) is not always representable.
        const double r = column_dot(win.col(i), win.col(j)) / k_minus_1;
        row[j] = r;
        result.entries[static_cast<size_t>(j) * n + i] = r;
      }
    }
  }
  return result;
}

std::vector<double> indicator_rows_blocked(const Dataset& dataset, int t, WindowSpec spec,
                                           const CorrOptions& opts, int block_size,
                                           int* inactive_count) {
  if (block_size < 1) {
    throw Error(ErrorKind::kInvalidSpec,
                "block_size must be >= 1, got " + std::to_string(block_size));
  }
  const ScaledWindow win = build_scaled_window(dataset, t, spec, opts);
  if (inactive_count != nullptr) *inactive_count = win.inactive_count;
  const int n = win.n;
  const int bs = std::min(block_size, n);
  const int n_blocks = (n + bs - 1) / bs;
  const bool pearson = opts.mode == Mode::kPearson;
  const double k_minus_1 = spec.k - 1;

  std::vector<double> rows(n, 0.0);

  // Each thread owns whole row blocks and sweeps the column blocks in
  // order, so every rows[i] is accumulated in a fixed order regardless of
  // the thread count.
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(resolve_threads(opts.threads))
#endif
  for (int bi = 0; bi < n_blocks; ++bi) {
    const int i_begin = bi * bs;
    const int i_end = std::min(i_begin + bs, n);
    for (int bj = 0; bj < n_blocks; ++bj) {
      const int j_begin = bj * bs;
      const int j_end = std::min(j_begin + bs, n);
      for (int i = i_begin; i < i_end; ++i) {
        if (pearson && !win.active[i]) continue;
        const auto ci = win.col(i);
        double acc = 0.0;
        for (int j = j_begin; j < j_end; ++j) {
          if (i == j) continue;  // diagonal handled exactly below
          const double dot = column_dot(ci, win.col(j));
          acc += std::abs(pearson ? dot : dot / k_minus_1);
        }
        rows[i] += acc;
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (pearson) {
      if (win.active[i]) rows[i] += 1.0;
    } else {
      rows[i] += std::abs(column_dot(win.col(i), win.col(i)) / k_minus_1);
    }
  }
  return rows;
}

}  // namespace corrstate
