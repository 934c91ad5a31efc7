#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "corrstate/io.hpp"
#include "generators.hpp"

using namespace corrstate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("corrstate_test_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kGoodMeta = R"({
  "format_version": 1,
  "parameters": [
    {"id": "a", "name": "alpha", "space": "actual", "units": "cu"},
    {"id": "b", "name": "beta", "space": "control", "units": "cu"}
  ]
})";

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kIoError;
}

}  // namespace

TEST_CASE("load_csv on a well-formed file") {
  TempDir dir;
  write_file(dir.path / "d.csv", "t,a,b\n1,1.5,2\n2,2.5,4\n3,3.5,6\n");
  write_file(dir.path / "m.json", kGoodMeta);
  const Dataset ds = load_csv(dir.path / "d.csv", dir.path / "m.json");
  CHECK(ds.t_max() == 3);
  CHECK(ds.n() == 2);
  CHECK(ds.value(2, 0) == 2.5);
  CHECK(ds.value(3, 1) == 6.0);
  CHECK(ds.parameter(1).space == ParameterSpace::kControl);
  CHECK(ds.parameter(0).name == "alpha");
}

TEST_CASE("load_csv error reporting") {
  TempDir dir;
  write_file(dir.path / "m.json", kGoodMeta);

  SUBCASE("blank cell names row and column") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5,2\n2,,4\n");
    const auto kind = kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); });
    CHECK(kind == ErrorKind::kParseError);
    try {
      load_csv(dir.path / "d.csv", dir.path / "m.json");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
  }
  SUBCASE("--fill-zero turns blanks into zeros") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5,2\n2,,4\n");
    const Dataset ds = load_csv(dir.path / "d.csv", dir.path / "m.json", {.fill_zero = true});
    CHECK(ds.value(2, 0) == 0.0);
  }
  SUBCASE("malformed number") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5,oops\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kParseError);
  }
  SUBCASE("ragged row") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kParseError);
  }
  SUBCASE("missing t header") {
    write_file(dir.path / "d.csv", "time,a,b\n1,1.5,2\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kSchemaError);
  }
  SUBCASE("non-consecutive time index") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5,2\n3,2.5,4\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kSchemaError);
  }
  SUBCASE("header only") {
    write_file(dir.path / "d.csv", "t,a,b\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kEmptyData);
  }
  SUBCASE("no parameter columns") {
    write_file(dir.path / "d.csv", "t\n1\n2\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "m.json"); }) ==
          ErrorKind::kEmptyData);
  }
  SUBCASE("sidecar id mismatch lists the symmetric difference") {
    write_file(dir.path / "d.csv", "t,a,c\n1,1.5,2\n");
    try {
      load_csv(dir.path / "d.csv", dir.path / "m.json");
      FAIL("expected SchemaError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kSchemaError);
      const std::string what = e.what();
      CHECK(what.find("c") != std::string::npos);
      CHECK(what.find("b") != std::string::npos);
    }
  }
  SUBCASE("missing sidecar file is a schema failure") {
    write_file(dir.path / "d.csv", "t,a,b\n1,1.5,2\n");
    CHECK(kind_of([&] { load_csv(dir.path / "d.csv", dir.path / "nope.json"); }) ==
          ErrorKind::kSchemaError);
  }
  SUBCASE("missing data file is an io failure") {
    CHECK(kind_of([&] { load_csv(dir.path / "nope.csv", dir.path / "m.json"); }) ==
          ErrorKind::kIoError);
  }
}

TEST_CASE("dataset round-trips bit-exactly through CSV") {
  TempDir dir;
  std::mt19937_64 rng(51);
  const Dataset ds = testgen::random_dataset(rng, 20, 5, {.offset = 3.0, .scale = 17.0});
  write_dataset_csv(ds, dir.path / "d.csv", dir.path / "m.json");
  const Dataset back = load_csv(dir.path / "d.csv", dir.path / "m.json");
  CHECK(back.raw_values() == ds.raw_values());
  REQUIRE(back.n() == ds.n());
  for (int j = 0; j < ds.n(); ++j) {
    CHECK(back.parameter(j).id == ds.parameter(j).id);
    CHECK(back.parameter(j).space == ds.parameter(j).space);
  }
}

TEST_CASE("validate") {
  std::mt19937_64 rng(52);
  SUBCASE("flags insufficient data") {
    const Dataset ds = testgen::random_dataset(rng, 5, 2);
    const ValidationSummary summary = validate(ds, WindowSpec{6});
    CHECK_FALSE(summary.analyzable());
    REQUIRE(!summary.findings.empty());
    CHECK(summary.findings[0].find("InsufficientData") != std::string::npos);
  }
  SUBCASE("all-zero column shows 0% activity") {
    const Dataset ds =
        testgen::random_dataset(rng, 20, 3, {.constant_cols = 1, .constant_value = 0.0});
    const ValidationSummary summary = validate(ds, WindowSpec{6});
    CHECK(summary.analyzable());
    CHECK(summary.activity[0].active_fraction == 0.0);
    CHECK(summary.activity[1].active_fraction == 1.0);
  }
  SUBCASE("duplicate columns are listed") {
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 10; ++t) {
      const double v = std::sin(t * 0.7);
      rows.push_back({v, 2.0 + t, v});
    }
    const Dataset ds = Dataset::from_rows(testgen::make_meta(3), rows);
    const ValidationSummary summary = validate(ds, WindowSpec{3});
    REQUIRE(summary.duplicate_columns.size() == 1);
    CHECK(summary.duplicate_columns[0] == std::pair<std::string, std::string>{"p0", "p2"});
  }
}

TEST_CASE("comparison report round-trips") {
  TempDir dir;
  ComparisonReport report;
  report.config.k = 6;
  report.config.mode = Mode::kPearson;
  report.config.threads = 4;
  report.config.seed = 12345;
  report.config.method_label = "budgeting";
  report.first_t = 7;
  report.last_t = 9;
  report.series.push_back({"base", 1229156.0, {409718.0, 409719.0, 409719.0}, {0, 1, 0}});
  report.series.push_back({"strategy", 1248571.0, {416190.0, 416190.0, 416191.0}, {0, 0, 0}});
  report.delta_total = 1229156.0 - 1248571.0;
  report.delta_step = {-6472.0, -6471.0, -6472.0};

  write_report(report, dir.path / "r.json");
  const ComparisonReport back = read_report(dir.path / "r.json");

  CHECK(back.format_version == report.format_version);
  CHECK(back.config.k == 6);
  CHECK(back.config.mode == Mode::kPearson);
  CHECK(back.config.method_label == "budgeting");
  REQUIRE(back.config.seed.has_value());
  CHECK(*back.config.seed == 12345);
  CHECK(back.first_t == 7);
  CHECK(back.last_t == 9);
  REQUIRE(back.series.size() == 2);
  CHECK(back.series[0].g_total == 1229156.0);
  CHECK(back.series[1].g_total == 1248571.0);
  CHECK(back.series[0].g_step == report.series[0].g_step);
  CHECK(back.series[0].inactive_counts == report.series[0].inactive_counts);
  REQUIRE(back.delta_total.has_value());
  CHECK(*back.delta_total == -19415.0);
  CHECK(back.delta_step == report.delta_step);
}

TEST_CASE("report numbers survive with full precision") {
  TempDir dir;
  ComparisonReport report;
  report.first_t = 7;
  report.last_t = 7;
  report.series.push_back({"x", 0.1 + 0.2, {1.0 / 3.0}, {0}});
  write_report(report, dir.path / "r.json");
  const ComparisonReport back = read_report(dir.path / "r.json");
  CHECK(back.series[0].g_total == 0.1 + 0.2);
  CHECK(back.series[0].g_step[0] == 1.0 / 3.0);
}

TEST_CASE("write_report rejects empty series") {
  TempDir dir;
  ComparisonReport report;
  report.first_t = 7;
  report.last_t = 7;
  CHECK(kind_of([&] { write_report(report, dir.path / "r.json"); }) ==
        ErrorKind::kInvalidReport);

  report.series.push_back({"x", 0.0, {}, {}});
  CHECK(kind_of([&] { write_report(report, dir.path / "r.json"); }) ==
        ErrorKind::kInvalidReport);
}

TEST_CASE("series CSV") {
  TempDir dir;
  std::mt19937_64 rng(53);
  const Dataset ds = testgen::random_dataset(rng, 9, 2);
  const IndicatorSeries series = indicator_series(ds, WindowSpec{6});  // 3 steps

  SUBCASE("single series: header plus one line per step") {
    write_series_csv(series, "base", dir.path / "s.csv");
    std::ifstream in(dir.path / "s.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);
  }

  SUBCASE("values re-parse exactly") {
    write_series_csv(series, "base", dir.path / "s.csv");
    const SeriesCsv back = read_series_csv(dir.path / "s.csv");
    REQUIRE(back.labels == std::vector<std::string>{"base"});
    REQUIRE(back.columns[0].size() == series.g_step.size());
    for (size_t s = 0; s < series.g_step.size(); ++s) {
      CHECK(back.t[s] == series.first_t + static_cast<int>(s));
      CHECK(back.columns[0][s] == series.g_step[s]);
    }
  }

  SUBCASE("two series with mismatched ranges") {
    const Dataset longer = testgen::random_dataset(rng, 12, 2);
    const IndicatorSeries other = indicator_series(longer, WindowSpec{6});
    CHECK(kind_of([&] {
            write_series_csv(series, "a", other, "b", dir.path / "s.csv");
          }) == ErrorKind::kRangeMismatch);
  }

  SUBCASE("two aligned series") {
    write_series_csv(series, "a", series, "b", dir.path / "s.csv");
    const SeriesCsv back = read_series_csv(dir.path / "s.csv");
    CHECK(back.labels == std::vector<std::string>{"a", "b"});
    CHECK(back.columns[0] == back.columns[1]);
  }
}

TEST_CASE("strategy and synthetic spec files round-trip") {
  TempDir dir;
  Strategy strategy;
  strategy.id = "upgrade";
  strategy.added_parameters.push_back(
      {{"s1", "sprinklers", ParameterSpace::kControl, "cu"}, {1.0, 2.5, 3.25}});
  strategy.overrides.push_back({"p1", 2, -7.5});
  strategy.scale_factors.push_back({"p2", 1.25});

  write_strategy(strategy, dir.path / "st.json");
  const Strategy back = load_strategy(dir.path / "st.json");
  CHECK(back.id == strategy.id);
  REQUIRE(back.added_parameters.size() == 1);
  CHECK(back.added_parameters[0].meta.id == "s1");
  CHECK(back.added_parameters[0].values == strategy.added_parameters[0].values);
  REQUIRE(back.overrides.size() == 1);
  CHECK(back.overrides[0].t == 2);
  CHECK(back.overrides[0].value == -7.5);
  REQUIRE(back.scale_factors.size() == 1);
  CHECK(back.scale_factors[0].factor == 1.25);

  SyntheticSpec spec;
  spec.n_base = 42;
  spec.seed = 999;
  spec.base_correlation = 0.25;
  write_synthetic_spec(spec, dir.path / "sp.json");
  const SyntheticSpec spec_back = load_synthetic_spec(dir.path / "sp.json");
  CHECK(spec_back.n_base == 42);
  CHECK(spec_back.seed == 999);
  CHECK(spec_back.base_correlation == 0.25);
}

TEST_CASE("strategy file with only an id is a valid empty strategy") {
  TempDir dir;
  write_file(dir.path / "st.json", R"({"format_version":1,"id":"noop"})");
  const Strategy back = load_strategy(dir.path / "st.json");
  CHECK(back.id == "noop");
  CHECK(back.added_parameters.empty());
  CHECK(back.overrides.empty());
  CHECK(back.scale_factors.empty());
}
