#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "harness.hpp"
#include "search.hpp"
#include "time_series.hpp"

namespace cyclefind {

enum class report_format { csv, json };

inline report_format format_from_name(const std::string& name) {
  if (name == "csv") return report_format::csv;
  if (name == "json") return report_format::json;
  throw invalid_argument("unknown format: " + name);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  if (line.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string_view::npos) {
        out.push_back(line.substr(start));
        break;
      }
      out.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

}  // namespace detail

/// Parses time,value records: '#' comment lines skipped anywhere, one
/// optional header allowed in the first record position (detected by a
/// non-numeric first field). Fields split on commas, or on whitespace when
/// a line has no comma. Rows are sorted by time when needed (stable);
/// duplicate timestamps are kept.
inline TimeSeries ingest_csv(std::istream& in, const std::string& label = "") {
  std::vector<double> times, values;
  std::string line;
  long line_no = 0;
  bool seen_record_position = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto fields = detail::split_fields(stripped);
    double t = 0.0, v = 0.0;
    if (fields.size() != 2) {
      if (!seen_record_position && !fields.empty() &&
          !detail::parse_double(fields[0], t)) {
        seen_record_position = true;  // header row
        continue;
      }
      throw parse_error("line " + std::to_string(line_no) +
                            ": expected 2 fields, got " +
                            std::to_string(fields.size()),
                        line_no);
    }
    if (!detail::parse_double(fields[0], t)) {
      if (!seen_record_position) {
        seen_record_position = true;  // header row
        continue;
      }
      throw parse_error(
          "line " + std::to_string(line_no) + ": cannot parse time field",
          line_no);
    }
    seen_record_position = true;
    if (!detail::parse_double(fields[1], v))
      throw parse_error(
          "line " + std::to_string(line_no) + ": cannot parse value field",
          line_no);
    if (!std::isfinite(t) || !std::isfinite(v))
      throw parse_error(
          "line " + std::to_string(line_no) + ": non-finite entry", line_no);
    times.push_back(t);
    values.push_back(v);
  }
  if (times.size() < 2)
    throw insufficient_data("csv: fewer than 2 valid rows");
  if (!std::is_sorted(times.begin(), times.end())) {
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&times](std::size_t a, std::size_t b) {
                       return times[a] < times[b];
                     });
    std::vector<double> t2(times.size()), v2(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      t2[i] = times[order[i]];
      v2[i] = values[order[i]];
    }
    times = std::move(t2);
    values = std::move(v2);
  }
  return TimeSeries(std::move(times), std::move(values), label);
}

inline TimeSeries ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  return ingest_csv(in, path);
}

// ---- objective curves ----

/// Two data columns; an undefined statistic leaves its field empty.
inline std::string emit_report(const ObjectiveCurve& curve, report_format fmt) {
  if (fmt == report_format::csv) {
    std::string out;
    out += "# method: " + std::string(method_name(curve.method)) + "\n";
    out += std::string("# sense: ") +
           (curve.sense == opt_sense::minimize ? "minimize" : "maximize") + "\n";
    out += "period,statistic\n";
    for (std::size_t i = 0; i < curve.periods.size(); ++i) {
      out += detail::format_double(curve.periods[i]);
      out += ',';
      if (curve.is_defined(i)) out += detail::format_double(curve.statistic[i]);
      out += '\n';
    }
    return out;
  }
  nlohmann::json j;
  j["method"] = method_name(curve.method);
  j["sense"] = curve.sense == opt_sense::minimize ? "minimize" : "maximize";
  j["periods"] = curve.periods;
  auto& stats = j["statistic"] = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.statistic.size(); ++i) {
    if (curve.is_defined(i))
      stats.push_back(curve.statistic[i]);
    else
      stats.push_back(nullptr);
  }
  return j.dump() + "\n";
}

inline ObjectiveCurve parse_curve_csv(const std::string& text) {
  ObjectiveCurve curve;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string_view meta = detail::trim(s.substr(1));
      if (meta.rfind("method:", 0) == 0)
        curve.method = method_from_name(
            std::string(detail::trim(meta.substr(7))));
      else if (meta.rfind("sense:", 0) == 0)
        curve.sense = detail::trim(meta.substr(6)) == "minimize"
                          ? opt_sense::minimize
                          : opt_sense::maximize;
      continue;
    }
    if (!have_header) {
      have_header = true;  // "period,statistic"
      continue;
    }
    const auto fields = detail::split_fields(s);
    if (fields.empty()) continue;
    double p = 0.0, v = std::numeric_limits<double>::quiet_NaN();
    if (!detail::parse_double(fields[0], p))
      throw parse_error("curve line " + std::to_string(line_no), line_no);
    if (fields.size() > 1 && !detail::trim(fields[1]).empty() &&
        !detail::parse_double(fields[1], v))
      throw parse_error("curve line " + std::to_string(line_no), line_no);
    curve.periods.push_back(p);
    curve.statistic.push_back(v);
  }
  return curve;
}

inline ObjectiveCurve parse_curve_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ObjectiveCurve curve;
  curve.method = method_from_name(j.at("method").get<std::string>());
  curve.sense = j.at("sense").get<std::string>() == "minimize"
                    ? opt_sense::minimize
                    : opt_sense::maximize;
  curve.periods = j.at("periods").get<std::vector<double>>();
  for (const auto& v : j.at("statistic"))
    curve.statistic.push_back(v.is_null()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : v.get<double>());
  return curve;
}

// ---- period estimates ----

inline std::string emit_report(const PeriodEstimate& est, report_format fmt) {
  if (fmt == report_format::csv) {
    std::string out = "period,statistic,method,significant,ci_low,ci_high\n";
    out += detail::format_double(est.period) + ',' +
           detail::format_double(est.statistic) + ',' + method_name(est.method) +
           ',';
    if (est.significant) out += *est.significant ? "true" : "false";
    out += ',';
    if (est.ci) out += detail::format_double(est.ci->first);
    out += ',';
    if (est.ci) out += detail::format_double(est.ci->second);
    out += '\n';
    return out;
  }
  nlohmann::json j;
  j["period"] = est.period;
  j["statistic"] = est.statistic;
  j["method"] = method_name(est.method);
  if (est.significant)
    j["significant"] = *est.significant;
  else
    j["significant"] = nullptr;
  if (est.ci)
    j["ci"] = {{"low", est.ci->first}, {"high", est.ci->second}};
  else
    j["ci"] = nullptr;
  return j.dump() + "\n";
}

inline PeriodEstimate parse_estimate_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PeriodEstimate est;
  est.period = j.at("period").get<double>();
  est.statistic = j.at("statistic").get<double>();
  est.method = method_from_name(j.at("method").get<std::string>());
  if (j.contains("significant") && !j.at("significant").is_null())
    est.significant = j.at("significant").get<bool>();
  if (j.contains("ci") && !j.at("ci").is_null())
    est.ci = std::make_pair(j.at("ci").at("low").get<double>(),
                            j.at("ci").at("high").get<double>());
  return est;
}

// ---- benchmark reports ----

inline nlohmann::json report_to_json(const BenchReport& report) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["software_version"] = report.software_version;
  j["study"] = report.study;
  j["methods"] = report.methods;
  j["replicates"] = report.replicates;
  j["master_seed"] = report.master_seed;
  j["grid"] = {{"min", report.grid_min},
               {"max", report.grid_max},
               {"step", report.grid_step}};
  j["baseline_sd"] = report.baseline_sd;
  j["subsample_proportion"] = report.subsample_proportion;
  j["accuracy"] = {{"true_period", report.true_period},
                   {"tolerance", report.tolerance}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json jc;
    jc["method"] = c.method;
    jc["condition"] = c.condition;
    jc["condition_value"] = c.condition_value;
    jc["total_variance_multiple"] = c.total_variance_multiple;
    jc["mse"] = c.mse;
    jc["accuracy_rate"] = c.accuracy_rate;
    jc["estimates"] = c.estimates;
    cells.push_back(std::move(jc));
  }
  return j;
}

inline BenchReport parse_report_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BenchReport r;
  r.schema_version = j.at("schema_version").get<int>();
  r.software_version = j.at("software_version").get<std::string>();
  r.study = j.at("study").get<std::string>();
  r.methods = j.at("methods").get<std::vector<std::string>>();
  r.replicates = j.at("replicates").get<int>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.grid_min = j.at("grid").at("min").get<double>();
  r.grid_max = j.at("grid").at("max").get<double>();
  r.grid_step = j.at("grid").at("step").get<double>();
  r.baseline_sd = j.at("baseline_sd").get<double>();
  r.subsample_proportion = j.at("subsample_proportion").get<double>();
  r.true_period = j.at("accuracy").at("true_period").get<double>();
  r.tolerance = j.at("accuracy").at("tolerance").get<double>();
  for (const auto& jc : j.at("cells")) {
    BenchCell c;
    c.method = jc.at("method").get<std::string>();
    c.condition = jc.at("condition").get<std::string>();
    c.condition_value = jc.at("condition_value").get<double>();
    c.total_variance_multiple = jc.at("total_variance_multiple").get<double>();
    c.mse = jc.at("mse").get<double>();
    c.accuracy_rate = jc.at("accuracy_rate").get<double>();
    c.estimates = jc.at("estimates").get<std::vector<double>>();
    r.cells.push_back(std::move(c));
  }
  return r;
}

/// CSV: study metadata in '#' comments, one row per cell, replicate
/// estimates ';'-joined in the last field so nothing is lost.
inline std::string emit_report(const BenchReport& report, report_format fmt) {
  if (fmt == report_format::json) return report_to_json(report).dump(2) + "\n";
  std::string out;
  out += "# schema_version: " + std::to_string(report.schema_version) + "\n";
  out += "# software_version: " + report.software_version + "\n";
  out += "# study: " + report.study + "\n";
  out += "# replicates: " + std::to_string(report.replicates) + "\n";
  out += "# master_seed: " + std::to_string(report.master_seed) + "\n";
  out += "# grid: " + detail::format_double(report.grid_min) + ":" +
         detail::format_double(report.grid_max) + ":" +
         detail::format_double(report.grid_step) + "\n";
  out += "# baseline_sd: " + detail::format_double(report.baseline_sd) + "\n";
  out += "# subsample_proportion: " +
         detail::format_double(report.subsample_proportion) + "\n";
  out += "# true_period: " + detail::format_double(report.true_period) + "\n";
  out += "# tolerance: " + detail::format_double(report.tolerance) + "\n";
  out += "# methods: ";
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    if (i) out += ',';
    out += report.methods[i];
  }
  out += "\n";
  out += "method,condition,condition_value,total_variance_multiple,mse,"
         "accuracy_rate,estimates\n";
  for (const auto& c : report.cells) {
    out += c.method + ",\"" + c.condition + "\"," +
           detail::format_double(c.condition_value) + ',' +
           detail::format_double(c.total_variance_multiple) + ',' +
           detail::format_double(c.mse) + ',' +
           detail::format_double(c.accuracy_rate) + ',';
    for (std::size_t i = 0; i < c.estimates.size(); ++i) {
      if (i) out += ';';
      out += detail::format_double(c.estimates[i]);
    }
    out += '\n';
  }
  return out;
}

inline BenchReport parse_report_csv(const std::string& text) {
  BenchReport r;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string_view meta = detail::trim(s.substr(1));
      const std::size_t colon = meta.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string key(detail::trim(meta.substr(0, colon)));
      const std::string val(detail::trim(meta.substr(colon + 1)));
      if (key == "schema_version") r.schema_version = std::stoi(val);
      else if (key == "software_version") r.software_version = val;
      else if (key == "study") r.study = val;
      else if (key == "replicates") r.replicates = std::stoi(val);
      else if (key == "master_seed") r.master_seed = std::stoull(val);
      else if (key == "grid") {
        const std::size_t a = val.find(':'), b = val.rfind(':');
        r.grid_min = std::stod(val.substr(0, a));
        r.grid_max = std::stod(val.substr(a + 1, b - a - 1));
        r.grid_step = std::stod(val.substr(b + 1));
      } else if (key == "baseline_sd") r.baseline_sd = std::stod(val);
      else if (key == "subsample_proportion") r.subsample_proportion = std::stod(val);
      else if (key == "true_period") r.true_period = std::stod(val);
      else if (key == "tolerance") r.tolerance = std::stod(val);
      else if (key == "methods") {
        std::size_t start = 0;
        while (start <= val.size()) {
          const std::size_t pos = val.find(',', start);
          const std::string item = val.substr(
              start, pos == std::string::npos ? std::string::npos : pos - start);
          if (!item.empty()) r.methods.push_back(item);
          if (pos == std::string::npos) break;
          start = pos + 1;
        }
      }
      continue;
    }
    if (!have_header) {
      have_header = true;
      continue;
    }
    // method,"condition",condition_value,total_variance_multiple,mse,acc,e1;e2
    BenchCell c;
    const std::string row(s);
    const std::size_t m_end = row.find(',');
    c.method = row.substr(0, m_end);
    const std::size_t q1 = row.find('"', m_end);
    const std::size_t q2 = row.find('"', q1 + 1);
    if (q1 == std::string::npos || q2 == std::string::npos)
      throw parse_error("report csv: malformed condition field");
    c.condition = row.substr(q1 + 1, q2 - q1 - 1);
    const auto rest = detail::split_fields(std::string_view(row).substr(q2 + 2));
    if (rest.size() != 5) throw parse_error("report csv: malformed row");
    double cv = 0.0, tv = 0.0, ms = 0.0, ar = 0.0;
    if (!detail::parse_double(rest[0], cv) || !detail::parse_double(rest[1], tv) ||
        !detail::parse_double(rest[2], ms) || !detail::parse_double(rest[3], ar))
      throw parse_error("report csv: malformed numeric field");
    c.condition_value = cv;
    c.total_variance_multiple = tv;
    c.mse = ms;
    c.accuracy_rate = ar;
    std::string_view est = rest[4];
    while (!est.empty()) {
      const std::size_t pos = est.find(';');
      double e = 0.0;
      if (!detail::parse_double(est.substr(0, pos), e))
        throw parse_error("report csv: malformed estimate");
      c.estimates.push_back(e);
      if (pos == std::string_view::npos) break;
      est.remove_prefix(pos + 1);
    }
    r.cells.push_back(std::move(c));
  }
  return r;
}

}  // namespace cyclefind
