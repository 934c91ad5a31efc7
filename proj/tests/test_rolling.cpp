#include <doctest.h>

#include <cmath>
#include <random>

#include "corrstate/correlation.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace corrstate;

namespace {

double rel_diff(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1.0});
  return std::abs(got - want) / scale;
}

double sweep_max_matrix_diff(const Dataset& ds, WindowSpec spec, const CorrOptions& opts,
                             int reinit_interval = kDefaultReinitInterval) {
  RollingMoments moments = RollingMoments::init(ds, spec, reinit_interval);
  std::vector<double> incoming(ds.n());
  double worst = 0.0;
  for (int t = spec.k + 1; t <= ds.t_max(); ++t) {
    const auto rolled = correlation_from_moments(moments, opts);
    const auto batch = correlation_at(ds, t, spec, opts);
    for (size_t e = 0; e < batch.entries.size(); ++e) {
      worst = std::max(worst, std::abs(rolled.entries[e] - batch.entries[e]));
    }
    if (t < ds.t_max()) {
      ds.copy_row(t, incoming);
      moments.step(incoming);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("rolling_init populates sums for the first window") {
  const Dataset ds = Dataset::from_rows(testgen::make_meta(1), {{1.0}, {2.0}, {3.0}});
  const RollingMoments m = rolling_init(ds, WindowSpec{2});
  CHECK(m.current_t() == 3);
  CHECK(m.column_sum(0) == 3.0);
  CHECK(m.squared_sum(0) == 5.0);
  CHECK(m.window_rows() == std::vector<std::vector<double>>{{1.0}, {2.0}});
}

TEST_CASE("rolling_init needs at least one analyzable step") {
  std::mt19937_64 rng(21);
  const Dataset ds = testgen::random_dataset(rng, 6, 2);
  CHECK_THROWS_AS(rolling_init(ds, WindowSpec{6}), Error);
}

TEST_CASE("rolling_init sums match brute force on a random dataset") {
  std::mt19937_64 rng(22);
  const Dataset ds = testgen::random_dataset(rng, 20, 5);
  const RollingMoments m = rolling_init(ds, WindowSpec{6});
  const auto win = oracle::window(ds, 7, 6);
  for (int i = 0; i < 5; ++i) {
    CHECK(rel_diff(m.column_sum(i), oracle::brute_column_sum(win, i)) <= 1e-12);
    for (int j = i; j < 5; ++j) {
      CHECK(rel_diff(m.pair_product_sum(i, j), oracle::brute_pair_sum(win, i, j)) <= 1e-12);
    }
  }
}

TEST_CASE("rolling_step slides the window") {
  const Dataset ds = Dataset::from_rows(testgen::make_meta(1), {{1.0}, {2.0}, {3.0}});
  RollingMoments m = rolling_init(ds, WindowSpec{2});
  const double incoming[] = {3.0};
  m.step(incoming);
  CHECK(m.current_t() == 4);
  CHECK(m.column_sum(0) == 5.0);
  CHECK(m.squared_sum(0) == 13.0);
  CHECK(m.window_rows() == std::vector<std::vector<double>>{{2.0}, {3.0}});
}

TEST_CASE("window buffer always holds the raw rows exactly") {
  std::mt19937_64 rng(23);
  const Dataset ds = testgen::random_dataset(rng, 40, 4);
  RollingMoments m = rolling_init(ds, WindowSpec{6});
  std::vector<double> incoming(4);
  for (int t = 7; t <= 40; ++t) {
    const auto rows = m.window_rows();
    for (int l = 0; l < 6; ++l) {
      for (int j = 0; j < 4; ++j) {
        CHECK(rows[l][j] == ds.value(t - 6 + l, j));
      }
    }
    if (t < 40) {
      ds.copy_row(t, incoming);
      m.step(incoming);
    }
  }
}

TEST_CASE("moment sums track brute force through a long sweep") {
  std::mt19937_64 rng(24);
  const Dataset ds = testgen::random_dataset(rng, 300, 8, {.offset = 50.0, .scale = 3.0});
  RollingMoments m = rolling_init(ds, WindowSpec{6});
  std::vector<double> incoming(8);
  for (int t = 7; t <= 300; ++t) {
    if (t % 37 == 0) {
      const auto win = oracle::window(ds, t, 6);
      for (int i = 0; i < 8; ++i) {
        CHECK(rel_diff(m.column_sum(i), oracle::brute_column_sum(win, i)) <= 1e-9);
        for (int j = i; j < 8; ++j) {
          CHECK(rel_diff(m.pair_product_sum(i, j), oracle::brute_pair_sum(win, i, j)) <= 1e-9);
        }
      }
    }
    if (t < 300) {
      ds.copy_row(t, incoming);
      m.step(incoming);
    }
  }
}

TEST_CASE("rolling equals batch across a full sweep") {
  std::mt19937_64 rng(25);
  const Dataset ds = testgen::random_dataset(rng, 200, 10);
  for (Mode mode : {Mode::kPearson, Mode::kRawMoment}) {
    CHECK(sweep_max_matrix_diff(ds, WindowSpec{6}, {.mode = mode}) <= 1e-9);
  }
  // k = 2 boundary
  CHECK(sweep_max_matrix_diff(ds, WindowSpec{2}, {}) <= 1e-9);
}

TEST_CASE("adversarial magnitudes stay within the drift budget") {
  const Dataset ds = testgen::adversarial_dataset(1006, 6);
  CHECK(sweep_max_matrix_diff(ds, WindowSpec{6}, {}) <= 1e-6);
  CHECK(sweep_max_matrix_diff(ds, WindowSpec{6}, {.mode = Mode::kRawMoment}, 256) /
            1e12 <=
        1e-6);  // raw entries scale with the squared magnitudes
}

TEST_CASE("indicator rows from moments match the blocked batch rows") {
  std::mt19937_64 rng(26);
  const Dataset ds = testgen::random_dataset(rng, 60, 12);
  RollingMoments m = rolling_init(ds, WindowSpec{6});
  std::vector<double> incoming(12);
  for (int t = 7; t <= 60; ++t) {
    const auto rolled = indicator_rows_from_moments(m);
    const auto batch = indicator_rows_blocked(ds, t, WindowSpec{6}, {}, 5);
    for (int i = 0; i < 12; ++i) {
      CHECK(std::abs(rolled[i] - batch[i]) <= 1e-8);
    }
    if (t < 60) {
      ds.copy_row(t, incoming);
      m.step(incoming);
    }
  }
}

TEST_CASE("constant column goes inactive in the moments path") {
  const Dataset ds = testgen::dataset_from_window({{5, 1}, {5, 2}, {5, 4}});
  const RollingMoments m = rolling_init(ds, WindowSpec{3});
  const auto corr = correlation_from_moments(m);
  CHECK(corr.at(0, 0) == 0.0);
  CHECK(corr.at(0, 1) == 0.0);
  CHECK(corr.at(1, 1) == 1.0);

  const auto rows = indicator_rows_from_moments(m);
  CHECK(rows[0] == 0.0);
}

TEST_CASE("rebuild interval does not change results on benign data") {
  std::mt19937_64 rng(27);
  const Dataset ds = testgen::random_dataset(rng, 120, 5);
  for (int interval : {1, 7, 0}) {  // every step, every 7th, never
    CHECK(sweep_max_matrix_diff(ds, WindowSpec{6}, {}, interval) <= 1e-9);
  }
}
