#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "corrstate/compensated.hpp"
#include "corrstate/correlation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrstate {

namespace {

// Scratch for the shifted incoming/outgoing rows of a step. The moments
// object is single-writer, so per-thread statics are not needed; keeping the
// buffers here avoids widening the class layout.
struct StepScratch {
  std::vector<double> in_s, out_s;
};

StepScratch& scratch() {
  thread_local StepScratch s;
  return s;
}

}  // namespace

RollingMoments RollingMoments::init(const Dataset& dataset, WindowSpec spec,
                                    int reinit_interval) {
  check_spec(dataset, spec);

  RollingMoments m;
  m.k_ = spec.k;
  m.n_ = dataset.n();
  m.t_ = spec.k + 1;
  m.reinit_interval_ = reinit_interval;
  m.head_ = 0;

  const size_t pairs = packed_index(m.n_, m.n_ - 1, m.n_ - 1) + 1;
  m.ring_.resize(static_cast<size_t>(m.k_) * m.n_);
  m.anchor_.resize(m.n_);
  m.s1_.resize(m.n_);
  m.c1_.resize(m.n_);
  m.sp_.resize(pairs);
  m.cp_.resize(pairs);

  // Window for t = k+1 covers rows 1..k, oldest first.
  for (int l = 0; l < m.k_; ++l) {
    dataset.copy_row(l + 1, {m.ring_.data() + static_cast<size_t>(l) * m.n_,
                             static_cast<size_t>(m.n_)});
  }
  m.rebuild();
  return m;
}

RollingMoments rolling_init(const Dataset& dataset, WindowSpec spec, int reinit_interval) {
  return RollingMoments::init(dataset, spec, reinit_interval);
}

void RollingMoments::rebuild() {
  const int k = k_;
  const int n = n_;

  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += ring_[static_cast<size_t>(l) * n + j];
    anchor_[j] = sum / k;
  }
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += ring_[static_cast<size_t>(l) * n + j] - anchor_[j];
    s1_[j] = sum;
    c1_[j] = 0.0;
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static, 16)
#endif
  for (int i = 0; i < n; ++i) {
    const size_t base = packed_index(n, i, i);
    for (int j = i; j < n; ++j) {
      double sum = 0.0;
      for (int l = 0; l < k; ++l) {
        const double* row = ring_.data() + static_cast<size_t>(l) * n;
        sum += (row[i] - anchor_[i]) * (row[j] - anchor_[j]);
      }
      sp_[base + (j - i)] = sum;
      cp_[base + (j - i)] = 0.0;
    }
  }
  steps_since_rebuild_ = 0;
}

void RollingMoments::step(std::span<const double> incoming) {
  const int k = k_;
  const int n = n_;
  auto& scr = scratch();
  scr.in_s.resize(n);
  scr.out_s.resize(n);
  double* in_s = scr.in_s.data();
  double* out_s = scr.out_s.data();

  const double* evicted = ring_.data() + static_cast<size_t>(head_) * n;
  for (int j = 0; j < n; ++j) {
    in_s[j] = incoming[j] - anchor_[j];
    out_s[j] = evicted[j] - anchor_[j];
  }

  for (int j = 0; j < n; ++j) {
    kahan_add(s1_[j], c1_[j], in_s[j] - out_s[j]);
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static, 16)
#endif
  for (int i = 0; i < n; ++i) {
    const double ai = in_s[i];
    const double bi = out_s[i];
    double* sp = sp_.data() + packed_index(n, i, i);
    double* cp = cp_.data() + packed_index(n, i, i);
    for (int j = i; j < n; ++j) {
      kahan_add(sp[j - i], cp[j - i], ai * in_s[j] - bi * out_s[j]);
    }
  }

  std::copy(incoming.begin(), incoming.end(),
            ring_.begin() + static_cast<size_t>(head_) * n);
  head_ = (head_ + 1) % k;
  ++t_;

  if (reinit_interval_ > 0 && ++steps_since_rebuild_ >= reinit_interval_) {
    rebuild();
  } else if (anchors_stale()) {
    rebuild();
  }
}

// The one-pass variance/covariance extraction loses roughly
// eps * (k*delta^2 / css) relative accuracy, where delta is the window mean's
// offset from the column anchor and css the centered sum of squares. When a
// window's spread collapses while the anchor is stale that ratio explodes, so
// re-anchor as soon as any column crosses the limit. The noise floor keeps
// rounding-level deltas (e.g. exactly constant columns) from firing.
bool RollingMoments::anchors_stale() const {
  constexpr double kDriftLimit = 100.0;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < n_; ++i) {
    const double s = s1_[i];
    const double k_delta_sq = s * s / k_;
    const double css = sp_[packed_index(n_, i, i)] - k_delta_sq;
    const double noise = 64.0 * kEps * (std::abs(anchor_[i]) + std::abs(s) / k_);
    if (k_delta_sq > kDriftLimit * std::max(css, 0.0) &&
        k_delta_sq > k_ * noise * noise) {
      return true;
    }
  }
  return false;
}

double RollingMoments::column_sum(int col) const {
  return s1_[col] + static_cast<double>(k_) * anchor_[col];
}

double RollingMoments::pair_product_sum(int i, int j) const {
  const int a = std::min(i, j);
  const int b = std::max(i, j);
  const double sp = sp_[packed_index(n_, a, b)];
  return sp + anchor_[a] * s1_[b] + anchor_[b] * s1_[a] +
         static_cast<double>(k_) * anchor_[a] * anchor_[b];
}

std::vector<std::vector<double>> RollingMoments::window_rows() const {
  std::vector<std::vector<double>> rows(k_, std::vector<double>(n_));
  for (int l = 0; l < k_; ++l) {
    const int src = (head_ + l) % k_;
    const double* row = ring_.data() + static_cast<size_t>(src) * n_;
    std::copy(row, row + n_, rows[l].begin());
  }
  return rows;
}

namespace {

struct MomentStats {
  std::vector<double> inv;       // 1/sqrt(centered sum of squares), 0 if inactive
  std::vector<uint8_t> active;
  int inactive_count = 0;
};

MomentStats pearson_stats(const RollingMoments& m, double variance_eps) {
  const int n = m.n();
  const int k = m.k();
  const auto s1 = m.shifted_sums();
  const auto sp = m.shifted_pair_sums();

  MomentStats st;
  st.inv.assign(n, 0.0);
  st.active.assign(n, 0);
  const double inv_k = 1.0 / k;
  for (int i = 0; i < n; ++i) {
    double css = sp[packed_index(n, i, i)] - s1[i] * s1[i] * inv_k;
    if (css < 0.0) css = 0.0;
    if (css / (k - 1) >= variance_eps) {
      st.active[i] = 1;
      st.inv[i] = 1.0 / std::sqrt(css);
    } else {
      ++st.inactive_count;
    }
  }
  return st;
}

}  // namespace

CorrelationMatrix correlation_from_moments(const RollingMoments& m, const CorrOptions& opts) {
  const int n = m.n();
  const int k = m.k();
  const auto s1 = m.shifted_sums();
  const auto sp = m.shifted_pair_sums();

  CorrelationMatrix result;
  result.n = n;
  result.t = m.current_t();
  result.mode = opts.mode;
  result.entries.resize(static_cast<size_t>(n) * n);

  if (opts.mode == Mode::kPearson) {
    const MomentStats st = pearson_stats(m, opts.variance_eps);
    const double inv_k = 1.0 / k;
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 8) num_threads(resolve_threads(opts.threads))
#endif
    for (int i = 0; i < n; ++i) {
      double* row = result.entries.data() + static_cast<size_t>(i) * n;
      row[i] = st.active[i] ? 1.0 : 0.0;
      const double ai = s1[i] * inv_k;
      const double* sp_row = sp.data() + packed_index(n, i, i);
      for (int j = i + 1; j < n; ++j) {
        const double num = sp_row[j - i] - ai * s1[j];
        const double r = num * st.inv[i] * st.inv[j];
        row[j] = r;
        result.entries[static_cast<size_t>(j) * n + i] = r;
      }
    }
  } else {
    const double k_minus_1 = k - 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 8) num_threads(resolve_threads(opts.threads))
#endif
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double r = m.pair_product_sum(i, j) / k_minus_1;
        result.entries[static_cast<size_t>(i) * n + j] = r;
        result.entries[static_cast<size_t>(j) * n + i] = r;
      }
    }
  }
  return result;
}

std::vector<double> indicator_rows_from_moments(const RollingMoments& m,
                                                const CorrOptions& opts,
                                                int* inactive_count) {
  const int n = m.n();
  const int k = m.k();
  const auto s1 = m.shifted_sums();
  const auto sp = m.shifted_pair_sums();
  const int threads = resolve_threads(opts.threads);

  std::vector<double> g(n, 0.0);
  std::vector<double> partial(static_cast<size_t>(threads) * n, 0.0);

  if (opts.mode == Mode::kPearson) {
    const MomentStats st = pearson_stats(m, opts.variance_eps);
    if (inactive_count != nullptr) *inactive_count = st.inactive_count;
    const double inv_k = 1.0 / k;

    // Upper-triangle sweep with per-thread row accumulators, reduced in
    // thread order afterwards: deterministic for a fixed thread count.
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
#ifdef _OPENMP
      double* gl = partial.data() + static_cast<size_t>(omp_get_thread_num()) * n;
#pragma omp for schedule(static, 16)
#else
      double* gl = partial.data();
#endif
      for (int i = 0; i < n; ++i) {
        if (!st.active[i]) continue;  // whole row is zero
        const double ai = s1[i] * inv_k;
        const double inv_i = st.inv[i];
        const double* sp_row = sp.data() + packed_index(n, i, i);
        double acc = 0.0;
        for (int j = i + 1; j < n; ++j) {
          const double num = sp_row[j - i] - ai * s1[j];
          const double a = std::abs(num * inv_i * st.inv[j]);
          acc += a;
          gl[j] += a;
        }
        gl[i] += acc;
      }
    }

    for (int tid = 0; tid < threads; ++tid) {
      const double* gl = partial.data() + static_cast<size_t>(tid) * n;
      for (int j = 0; j < n; ++j) g[j] += gl[j];
    }
    for (int i = 0; i < n; ++i) {
      if (st.active[i]) g[i] += 1.0;
    }
  } else {
    if (inactive_count != nullptr) {
      *inactive_count = pearson_stats(m, opts.variance_eps).inactive_count;
    }
    const auto anchor = m.anchors();
    const double k_minus_1 = k - 1;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
#ifdef _OPENMP
      double* gl = partial.data() + static_cast<size_t>(omp_get_thread_num()) * n;
#pragma omp for schedule(static, 16)
#else
      double* gl = partial.data();
#endif
      for (int i = 0; i < n; ++i) {
        const double* sp_row = sp.data() + packed_index(n, i, i);
        const double a_i = anchor[i];
        const double s_i = s1[i];
        for (int j = i; j < n; ++j) {
          const double raw =
              sp_row[j - i] + a_i * s1[j] + anchor[j] * s_i + static_cast<double>(k) * a_i * anchor[j];
          const double a = std::abs(raw / k_minus_1);
          if (j == i) {
            gl[i] += a;
          } else {
            gl[i] += a;
            gl[j] += a;
          }
        }
      }
    }
    for (int tid = 0; tid < threads; ++tid) {
      const double* gl = partial.data() + static_cast<size_t>(tid) * n;
      for (int j = 0; j < n; ++j) g[j] += gl[j];
    }
  }
  return g;
}

}  // namespace corrstate
