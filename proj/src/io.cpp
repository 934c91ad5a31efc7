#include "corrstate/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace corrstate {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

double parse_double_token(std::string_view token, int line, const std::string& column_label,
                          bool fill_zero) {
  if (token.empty()) {
    if (fill_zero) return 0.0;
    throw Error(ErrorKind::kParseError,
                "blank cell at line " + std::to_string(line) + ", column '" + column_label +
                    "' (use --fill-zero if blanks mean zero)");
  }
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::kParseError,
                "malformed number '" + std::string(token) + "' at line " + std::to_string(line) +
                    ", column '" + column_label + "'");
  }
  return value;
}

int parse_int_token(std::string_view token, int line, const char* what) {
  int value = 0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
    throw Error(ErrorKind::kParseError, std::string("malformed ") + what + " '" +
                                            std::string(token) + "' at line " +
                                            std::to_string(line));
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

struct CsvContent {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::string>> rows;  // (line number, text)
};

CsvContent read_csv_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  }
  CsvContent content;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line.front() == '#') continue;  // version comment
    if (line.empty()) continue;
    if (!have_header) {
      for (auto field : split_csv_line(line)) content.header.emplace_back(field);
      have_header = true;
    } else {
      content.rows.emplace_back(line_no, line);
    }
  }
  if (!have_header) {
    throw Error(ErrorKind::kEmptyData, "'" + path.string() + "' has no header row");
  }
  return content;
}

ordered_json parse_json_file(const std::filesystem::path& path, ErrorKind missing_kind) {
  std::ifstream in(path);
  if (!in) {
    throw Error(missing_kind, "cannot open '" + path.string() + "'");
  }
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, "'" + path.string() + "': " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw Error(ErrorKind::kIoError, "write failed for '" + path.string() + "'");
  }
}

template <typename T>
T json_get(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw Error(ErrorKind::kSchemaError, where + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchemaError, where + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

Dataset load_csv(const std::filesystem::path& data_path,
                 const std::filesystem::path& meta_path, LoadOptions opts) {
  const CsvContent content = read_csv_lines(data_path);

  if (content.header.empty() || content.header[0] != "t") {
    throw Error(ErrorKind::kSchemaError,
                "'" + data_path.string() + "': first header column must be 't'");
  }
  const int n = static_cast<int>(content.header.size()) - 1;
  if (n < 1) {
    throw Error(ErrorKind::kEmptyData, "'" + data_path.string() + "' has no parameter columns");
  }
  if (content.rows.empty()) {
    throw Error(ErrorKind::kEmptyData, "'" + data_path.string() + "' has no data rows");
  }
  const int t_max = static_cast<int>(content.rows.size());

  std::vector<double> values(static_cast<size_t>(n) * t_max);
  for (int r = 0; r < t_max; ++r) {
    const auto& [line_no, text] = content.rows[r];
    const auto fields = split_csv_line(text);
    if (fields.size() != content.header.size()) {
      throw Error(ErrorKind::kParseError,
                  "ragged row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(content.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    const int t = parse_int_token(fields[0], line_no, "time index");
    if (t != r + 1) {
      throw Error(ErrorKind::kSchemaError,
                  "non-consecutive time index at line " + std::to_string(line_no) +
                      ": expected t=" + std::to_string(r + 1) + ", got " + std::to_string(t));
    }
    for (int j = 0; j < n; ++j) {
      values[static_cast<size_t>(j) * t_max + r] =
          parse_double_token(fields[j + 1], line_no, content.header[j + 1], opts.fill_zero);
    }
  }

  // Sidecar metadata; the example text for a missing sidecar is a schema
  // failure, not an io failure.
  const ordered_json meta_json = parse_json_file(meta_path, ErrorKind::kSchemaError);
  if (!meta_json.contains("parameters") || !meta_json["parameters"].is_array()) {
    throw Error(ErrorKind::kSchemaError,
                "'" + meta_path.string() + "': missing 'parameters' array");
  }

  std::unordered_map<std::string, ParameterMeta> by_id;
  for (const auto& entry : meta_json["parameters"]) {
    ParameterMeta meta;
    meta.id = json_get<std::string>(entry, "id", meta_path.string());
    meta.name = json_get<std::string>(entry, "name", meta_path.string());
    meta.space = parse_space(json_get<std::string>(entry, "space", meta_path.string()));
    meta.units = json_get<std::string>(entry, "units", meta_path.string());
    if (!by_id.emplace(meta.id, std::move(meta)).second) {
      throw Error(ErrorKind::kSchemaError,
                  "'" + meta_path.string() + "': duplicate parameter id '" +
                      entry.at("id").get<std::string>() + "'");
    }
  }

  std::set<std::string> csv_ids(content.header.begin() + 1, content.header.end());
  if (csv_ids.size() != content.header.size() - 1) {
    throw Error(ErrorKind::kSchemaError,
                "'" + data_path.string() + "': duplicate column id in header");
  }
  std::set<std::string> meta_ids;
  for (const auto& [id, meta] : by_id) meta_ids.insert(id);

  if (csv_ids != meta_ids) {
    std::string only_csv, only_meta;
    for (const auto& id : csv_ids) {
      if (meta_ids.count(id) == 0) only_csv += (only_csv.empty() ? "" : ", ") + id;
    }
    for (const auto& id : meta_ids) {
      if (csv_ids.count(id) == 0) only_meta += (only_meta.empty() ? "" : ", ") + id;
    }
    throw Error(ErrorKind::kSchemaError,
                "parameter ids differ between data and sidecar; only in data: [" + only_csv +
                    "], only in sidecar: [" + only_meta + "]");
  }

  std::vector<ParameterMeta> meta;
  meta.reserve(n);
  for (int j = 0; j < n; ++j) meta.push_back(by_id.at(content.header[j + 1]));

  return Dataset(std::move(meta), t_max, std::move(values));
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& data_path,
                       const std::filesystem::path& meta_path) {
  std::ostringstream csv;
  csv << "# format_version " << kFormatVersion << "\n";
  csv << "t";
  for (const auto& m : dataset.parameters()) {
    if (m.id.find(',') != std::string::npos || m.id.find('\n') != std::string::npos) {
      throw Error(ErrorKind::kInvalidSpec, "parameter id '" + m.id + "' not CSV-safe");
    }
    csv << ',' << m.id;
  }
  csv << '\n';
  for (int t = 1; t <= dataset.t_max(); ++t) {
    csv << t;
    for (int j = 0; j < dataset.n(); ++j) {
      csv << ',' << format_double(dataset.value(t, j));
    }
    csv << '\n';
  }
  write_text_file(data_path, csv.str());

  ordered_json meta_json;
  meta_json["format_version"] = kFormatVersion;
  meta_json["parameters"] = ordered_json::array();
  for (const auto& m : dataset.parameters()) {
    ordered_json entry;
    entry["id"] = m.id;
    entry["name"] = m.name;
    entry["space"] = space_name(m.space);
    entry["units"] = m.units;
    meta_json["parameters"].push_back(std::move(entry));
  }
  write_text_file(meta_path, meta_json.dump(2) + "\n");
}

ValidationSummary validate(const Dataset& dataset, WindowSpec spec, double variance_eps) {
  ValidationSummary summary;
  summary.t_max = dataset.t_max();
  summary.n = dataset.n();
  summary.k = spec.k;
  summary.feasible = spec.k >= 2 && dataset.t_max() >= spec.k + 1;
  if (summary.feasible) {
    summary.first_t = spec.k + 1;
    summary.last_t = dataset.t_max();
  } else if (spec.k < 2) {
    summary.findings.push_back("InvalidSpec: window length k must be >= 2");
  } else {
    summary.findings.push_back("InsufficientData: t_max=" + std::to_string(dataset.t_max()) +
                               " < k+1=" + std::to_string(spec.k + 1) +
                               "; no analyzable step");
  }

  double min_v = dataset.raw_values()[0];
  double max_v = min_v;
  for (double v : dataset.raw_values()) {
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
  }
  summary.min_value = min_v;
  summary.max_value = max_v;

  summary.activity.resize(dataset.n());
  for (int j = 0; j < dataset.n(); ++j) {
    summary.activity[j].id = dataset.parameter(j).id;
    if (!summary.feasible) continue;
    int active_windows = 0;
    const int steps = summary.last_t - summary.first_t + 1;
    for (int t = summary.first_t; t <= summary.last_t; ++t) {
      const auto col = dataset.window_column(t, spec.k, j);
      double sum = 0.0;
      for (double v : col) sum += v;
      const double mean = sum / spec.k;
      double css = 0.0;
      for (double v : col) css += (v - mean) * (v - mean);
      if (css / (spec.k - 1) >= variance_eps) ++active_windows;
    }
    summary.activity[j].active_fraction = static_cast<double>(active_windows) / steps;
    if (active_windows == 0) {
      summary.findings.push_back("column '" + dataset.parameter(j).id +
                                 "' is inactive in every window");
    }
  }

  // Exact duplicate columns; grouped by a cheap prefix key first.
  std::unordered_map<double, std::vector<int>> groups;
  for (int j = 0; j < dataset.n(); ++j) {
    groups[dataset.value(1, j)].push_back(j);
  }
  for (const auto& [key, cols] : groups) {
    for (size_t a = 0; a < cols.size(); ++a) {
      for (size_t b = a + 1; b < cols.size(); ++b) {
        const auto ca = dataset.column(cols[a]);
        const auto cb = dataset.column(cols[b]);
        if (std::equal(ca.begin(), ca.end(), cb.begin())) {
          summary.duplicate_columns.emplace_back(dataset.parameter(cols[a]).id,
                                                 dataset.parameter(cols[b]).id);
        }
      }
    }
  }
  std::sort(summary.duplicate_columns.begin(), summary.duplicate_columns.end());
  if (!summary.duplicate_columns.empty()) {
    summary.findings.push_back(std::to_string(summary.duplicate_columns.size()) +
                               " duplicate column pair(s)");
  }
  return summary;
}

std::string to_text(const ValidationSummary& summary) {
  std::ostringstream out;
  out << "dataset: t_max=" << summary.t_max << " n=" << summary.n << " k=" << summary.k
      << "\n";
  if (summary.feasible) {
    out << "analyzable range: t in [" << summary.first_t << ", " << summary.last_t << "] ("
        << (summary.last_t - summary.first_t + 1) << " steps)\n";
  } else {
    out << "not analyzable\n";
  }
  out << "value range: [" << format_double(summary.min_value) << ", "
      << format_double(summary.max_value) << "]\n";

  int fully_active = 0;
  double min_fraction = summary.activity.empty() ? 0.0 : 1.0;
  std::string least_active;
  for (const auto& a : summary.activity) {
    if (a.active_fraction >= 1.0) ++fully_active;
    if (a.active_fraction <= min_fraction) {
      min_fraction = a.active_fraction;
      least_active = a.id;
    }
  }
  out << "columns active in all windows: " << fully_active << "/" << summary.activity.size()
      << "\n";
  if (!least_active.empty()) {
    out << "least active column: '" << least_active << "' ("
        << format_double(min_fraction * 100.0) << "% of windows)\n";
  }
  for (const auto& [a, b] : summary.duplicate_columns) {
    out << "duplicate columns: '" << a << "' == '" << b << "'\n";
  }
  for (const auto& finding : summary.findings) {
    out << "finding: " << finding << "\n";
  }
  return out.str();
}

namespace {

ordered_json echo_to_json(const ConfigEcho& echo) {
  ordered_json j;
  j["k"] = echo.k;
  j["mode"] = mode_name(echo.mode);
  j["variance_threshold"] = echo.variance_threshold;
  j["block_size"] = echo.block_size;
  j["reinit_interval"] = echo.reinit_interval;
  j["threads"] = echo.threads;
  j["rolling"] = echo.rolling;
  j["method_label"] = echo.method_label;
  if (echo.seed.has_value()) {
    j["seed"] = *echo.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["rng"] = echo.rng;
  return j;
}

ConfigEcho echo_from_json(const ordered_json& j, const std::string& where) {
  ConfigEcho echo;
  echo.k = json_get<int>(j, "k", where);
  echo.mode = parse_mode(json_get<std::string>(j, "mode", where));
  echo.variance_threshold = json_get<double>(j, "variance_threshold", where);
  echo.block_size = json_get<int>(j, "block_size", where);
  echo.reinit_interval = json_get<int>(j, "reinit_interval", where);
  echo.threads = json_get<int>(j, "threads", where);
  echo.rolling = json_get<bool>(j, "rolling", where);
  echo.method_label = json_get<std::string>(j, "method_label", where);
  if (j.contains("seed") && !j["seed"].is_null()) {
    echo.seed = j["seed"].get<unsigned long long>();
  }
  echo.rng = json_get<std::string>(j, "rng", where);
  return echo;
}

}  // namespace

void write_report(const ComparisonReport& report, const std::filesystem::path& path) {
  if (report.series.empty()) {
    throw Error(ErrorKind::kInvalidReport, "report has no series");
  }
  const size_t steps = static_cast<size_t>(report.last_t - report.first_t + 1);
  for (const auto& s : report.series) {
    if (s.g_step.empty()) {
      throw Error(ErrorKind::kInvalidReport, "series '" + s.label + "' has no per-step values");
    }
    if (s.g_step.size() != steps || s.inactive_counts.size() != steps) {
      throw Error(ErrorKind::kInvalidReport,
                  "series '" + s.label + "' length does not match the report time range");
    }
  }

  ordered_json j;
  j["format_version"] = report.format_version;
  j["tool"] = {{"name", kToolName}, {"version", report.config.tool_version}};
  j["config"] = echo_to_json(report.config);
  j["first_t"] = report.first_t;
  j["last_t"] = report.last_t;
  j["series"] = ordered_json::array();
  for (const auto& s : report.series) {
    ordered_json sj;
    sj["label"] = s.label;
    sj["g_total"] = s.g_total;
    sj["g_step"] = s.g_step;
    sj["inactive_counts"] = s.inactive_counts;
    j["series"].push_back(std::move(sj));
  }
  if (report.delta_total.has_value()) {
    j["delta_total"] = *report.delta_total;
    j["delta_step"] = report.delta_step;
  }
  write_text_file(path, j.dump(2) + "\n");
}

ComparisonReport read_report(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path, ErrorKind::kIoError);
  const std::string where = path.string();

  ComparisonReport report;
  report.format_version = json_get<int>(j, "format_version", where);
  if (!j.contains("tool") || !j["tool"].contains("version")) {
    throw Error(ErrorKind::kSchemaError, where + ": missing tool version");
  }
  report.config = echo_from_json(j.contains("config") ? j["config"] : ordered_json{}, where);
  report.config.tool_version = j["tool"]["version"].get<std::string>();
  report.first_t = json_get<int>(j, "first_t", where);
  report.last_t = json_get<int>(j, "last_t", where);
  if (!j.contains("series") || !j["series"].is_array() || j["series"].empty()) {
    throw Error(ErrorKind::kInvalidReport, where + ": missing or empty series");
  }
  for (const auto& sj : j["series"]) {
    SeriesReport s;
    s.label = json_get<std::string>(sj, "label", where);
    s.g_total = json_get<double>(sj, "g_total", where);
    s.g_step = json_get<std::vector<double>>(sj, "g_step", where);
    s.inactive_counts = json_get<std::vector<int>>(sj, "inactive_counts", where);
    if (s.g_step.empty()) {
      throw Error(ErrorKind::kInvalidReport, where + ": series '" + s.label + "' is empty");
    }
    report.series.push_back(std::move(s));
  }
  if (j.contains("delta_total")) {
    report.delta_total = j["delta_total"].get<double>();
    report.delta_step = json_get<std::vector<double>>(j, "delta_step", where);
  }
  return report;
}

namespace {

void write_series_csv_impl(const std::vector<std::pair<std::string, const IndicatorSeries*>>& series,
                           const std::filesystem::path& path) {
  const IndicatorSeries* first = series.front().second;
  for (const auto& [label, s] : series) {
    if (s->first_t != first->first_t || s->last_t != first->last_t) {
      throw Error(ErrorKind::kRangeMismatch,
                  "series '" + label + "' covers t [" + std::to_string(s->first_t) + ", " +
                      std::to_string(s->last_t) + "] but '" + series.front().first +
                      "' covers [" + std::to_string(first->first_t) + ", " +
                      std::to_string(first->last_t) + "]");
    }
  }

  std::ostringstream out;
  out << "t";
  for (const auto& [label, s] : series) out << ",G_" << label;
  out << '\n';
  for (int t = first->first_t; t <= first->last_t; ++t) {
    out << t;
    for (const auto& [label, s] : series) out << ',' << format_double(s->step_at(t));
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace

void write_series_csv(const IndicatorSeries& series, std::string_view label,
                      const std::filesystem::path& path) {
  write_series_csv_impl({{std::string(label), &series}}, path);
}

void write_series_csv(const IndicatorSeries& a, std::string_view label_a,
                      const IndicatorSeries& b, std::string_view label_b,
                      const std::filesystem::path& path) {
  write_series_csv_impl({{std::string(label_a), &a}, {std::string(label_b), &b}}, path);
}

SeriesCsv read_series_csv(const std::filesystem::path& path) {
  const CsvContent content = read_csv_lines(path);
  if (content.header.empty() || content.header[0] != "t") {
    throw Error(ErrorKind::kSchemaError, "'" + path.string() + "': first column must be 't'");
  }
  SeriesCsv out;
  for (size_t c = 1; c < content.header.size(); ++c) {
    std::string label = content.header[c];
    if (label.rfind("G_", 0) == 0) label = label.substr(2);
    out.labels.push_back(std::move(label));
  }
  out.columns.resize(out.labels.size());
  for (const auto& [line_no, text] : content.rows) {
    const auto fields = split_csv_line(text);
    if (fields.size() != content.header.size()) {
      throw Error(ErrorKind::kParseError, "ragged row at line " + std::to_string(line_no));
    }
    out.t.push_back(parse_int_token(fields[0], line_no, "time index"));
    for (size_t c = 1; c < fields.size(); ++c) {
      out.columns[c - 1].push_back(
          parse_double_token(fields[c], line_no, content.header[c], false));
    }
  }
  return out;
}

void write_strategy(const Strategy& strategy, const std::filesystem::path& path) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["id"] = strategy.id;
  j["added_parameters"] = ordered_json::array();
  for (const auto& added : strategy.added_parameters) {
    ordered_json aj;
    aj["meta"] = {{"id", added.meta.id},
                  {"name", added.meta.name},
                  {"space", space_name(added.meta.space)},
                  {"units", added.meta.units}};
    aj["values"] = added.values;
    j["added_parameters"].push_back(std::move(aj));
  }
  j["overrides"] = ordered_json::array();
  for (const auto& ov : strategy.overrides) {
    j["overrides"].push_back({{"id", ov.parameter_id}, {"t", ov.t}, {"value", ov.value}});
  }
  j["scale_factors"] = ordered_json::array();
  for (const auto& sf : strategy.scale_factors) {
    j["scale_factors"].push_back({{"id", sf.parameter_id}, {"factor", sf.factor}});
  }
  write_text_file(path, j.dump(2) + "\n");
}

Strategy load_strategy(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path, ErrorKind::kIoError);
  const std::string where = path.string();

  Strategy strategy;
  strategy.id = json_get<std::string>(j, "id", where);
  if (j.contains("added_parameters")) {
    for (const auto& aj : j["added_parameters"]) {
      AddedParameter added;
      if (!aj.contains("meta")) {
        throw Error(ErrorKind::kSchemaError, where + ": added parameter without meta");
      }
      added.meta.id = json_get<std::string>(aj["meta"], "id", where);
      added.meta.name = json_get<std::string>(aj["meta"], "name", where);
      added.meta.space = parse_space(json_get<std::string>(aj["meta"], "space", where));
      added.meta.units = json_get<std::string>(aj["meta"], "units", where);
      added.values = json_get<std::vector<double>>(aj, "values", where);
      strategy.added_parameters.push_back(std::move(added));
    }
  }
  if (j.contains("overrides")) {
    for (const auto& oj : j["overrides"]) {
      ValueOverride ov;
      ov.parameter_id = json_get<std::string>(oj, "id", where);
      ov.t = json_get<int>(oj, "t", where);
      ov.value = json_get<double>(oj, "value", where);
      strategy.overrides.push_back(std::move(ov));
    }
  }
  if (j.contains("scale_factors")) {
    for (const auto& sj : j["scale_factors"]) {
      ScaleFactor sf;
      sf.parameter_id = json_get<std::string>(sj, "id", where);
      sf.factor = json_get<double>(sj, "factor", where);
      strategy.scale_factors.push_back(std::move(sf));
    }
  }
  return strategy;
}

void write_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["n_base"] = spec.n_base;
  j["t_max"] = spec.t_max;
  j["seed"] = spec.seed;
  j["base_correlation"] = spec.base_correlation;
  j["coupled_count"] = spec.coupled_count;
  j["coupling"] = spec.coupling;
  write_text_file(path, j.dump(2) + "\n");
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path, ErrorKind::kIoError);
  const std::string where = path.string();

  SyntheticSpec spec;
  spec.n_base = json_get<int>(j, "n_base", where);
  spec.t_max = json_get<int>(j, "t_max", where);
  spec.seed = json_get<std::uint64_t>(j, "seed", where);
  spec.base_correlation = json_get<double>(j, "base_correlation", where);
  spec.coupled_count = json_get<int>(j, "coupled_count", where);
  spec.coupling = json_get<double>(j, "coupling", where);
  return spec;
}

}  // namespace corrstate
