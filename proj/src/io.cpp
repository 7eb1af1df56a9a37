#include "fewcycle/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fewcycle {

namespace {

std::string trimmed(const std::string& s) {
  const auto lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return "";
  const auto hi = s.find_last_not_of(" \t");
  return s.substr(lo, hi - lo + 1);
}

double parse_double_strict(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": cannot parse '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void append_extras(Table& t, const ConstCols& extras) {
  for (const auto& [name, value] : extras) {
    t.columns.push_back(name);
    for (auto& row : t.rows) row.push_back(value);
  }
}

} // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_angle(const std::string& text) {
  const std::string s = trimmed(text);
  if (s.empty()) throw std::invalid_argument("angle: empty string");
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    const std::string head = trimmed(s.substr(0, s.size() - 2));
    double k = 1.0;
    if (head.empty())
      k = 1.0;
    else if (head == "-")
      k = -1.0;
    else if (head == "+")
      k = 1.0;
    else
      k = parse_double_strict(head, "angle");
    return k * std::numbers::pi;
  }
  return parse_double_strict(s, "angle");
}

std::vector<double> parse_range(const std::string& text, bool include_end) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("range: expected lo:hi:n, got '" + text + "'");
  const double lo = parse_angle(text.substr(0, c1));
  const double hi = parse_angle(text.substr(c1 + 1, c2 - c1 - 1));
  const std::string tail = trimmed(text.substr(c2 + 1));
  const long n = std::strtol(tail.c_str(), nullptr, 10);
  if (n < 1 || std::to_string(n) != tail)
    throw std::invalid_argument("range: point count must be a positive integer");
  return linspace(lo, hi, static_cast<std::size_t>(n), include_end);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_table_csv(const std::string& path, const Table& t) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_g17(row[i]);
    out << '\n';
  }
}

void write_table_json(const std::string& path, const Table& t,
                      const RunManifest& m) {
  nlohmann::json j;
  j["manifest"] = m.stable_json();
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  std::ofstream out = open_out(path);
  out << j.dump(1) << '\n';
}

void write_manifest_sidecar(const std::string& path, const RunManifest& m) {
  std::ofstream out = open_out(path + ".manifest.json");
  out << m.full_json().dump(1) << '\n';
}

void write_gridmap_csv(const std::string& path, const GridMap& map) {
  std::ofstream out = open_out(path);
  out << csv_escape(map.y_axis.name + "\\" + map.x_axis.name);
  for (double x : map.x_axis.values) out << ',' << format_g17(x);
  out << '\n';
  for (std::size_t iy = 0; iy < map.ny(); ++iy) {
    out << format_g17(map.y_axis.values[iy]);
    for (std::size_t ix = 0; ix < map.nx(); ++ix)
      out << ',' << format_g17(map.at(iy, ix));
    out << '\n';
  }
}

Table trajectory_table(const Trajectory& traj) {
  Table t;
  t.columns = {"t", "re_c", "im_c", "re_d", "im_d", "c_prob", "w", "norm"};
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    t.rows.push_back({traj.times[i], traj.c_amp[i].real(), traj.c_amp[i].imag(),
                      traj.d_amp[i].real(), traj.d_amp[i].imag(), traj.c_prob[i],
                      traj.w[i], traj.norm[i]});
  return t;
}

Table trace_table(const TraceComparison& tc, const ConstCols& extras) {
  Table t;
  t.columns = {"t", "f_abs_analytic", "f_abs_numeric", "abs_gap"};
  t.rows.reserve(tc.times.size());
  for (std::size_t i = 0; i < tc.times.size(); ++i)
    t.rows.push_back({tc.times[i], tc.f_abs_analytic[i], tc.f_abs_numeric[i],
                      std::abs(tc.f_abs_analytic[i] - tc.f_abs_numeric[i])});
  append_extras(t, extras);
  return t;
}

Table sweep_table(const std::vector<SweepRecord>& recs,
                  const std::string& param_name, const std::string& analytic_name,
                  const std::string& numeric_name, const ConstCols& extras) {
  Table t;
  t.columns = {param_name, analytic_name, numeric_name, "abs_diff"};
  t.rows.reserve(recs.size());
  for (const SweepRecord& r : recs)
    t.rows.push_back({r.param, r.analytic, r.numeric, r.difference});
  append_extras(t, extras);
  return t;
}

Table field_sweep_table(const std::vector<FieldSweepCurve>& curves,
                        const ConstCols& extras) {
  Table t;
  t.columns = {"cep",      "field_ratio",  "w_f_analytic",
               "w_f_numeric", "abs_diff", "is_numeric_min"};
  for (const FieldSweepCurve& curve : curves) {
    std::vector<char> is_min(curve.records.size(), 0);
    for (std::size_t i : curve.numeric_minima) is_min[i] = 1;
    for (std::size_t i = 0; i < curve.records.size(); ++i) {
      const SweepRecord& r = curve.records[i];
      t.rows.push_back({curve.cep, r.param, r.analytic, r.numeric, r.difference,
                        static_cast<double>(is_min[i])});
    }
  }
  append_extras(t, extras);
  return t;
}

Table gridmap_long_table(const GridMap& map) {
  Table t;
  t.columns = {map.x_axis.name, map.y_axis.name, "value"};
  t.rows.reserve(map.values.size());
  for (std::size_t iy = 0; iy < map.ny(); ++iy)
    for (std::size_t ix = 0; ix < map.nx(); ++ix)
      t.rows.push_back({map.x_axis.values[ix], map.y_axis.values[iy], map.at(iy, ix)});
  return t;
}

Table guideline_table(const AgreementMap& am) {
  Table t;
  t.columns = {am.map.x_axis.name, "guideline_" + am.map.y_axis.name};
  for (std::size_t ix = 0; ix < am.map.nx(); ++ix)
    t.rows.push_back({am.map.x_axis.values[ix], am.guideline_detuning[ix]});
  return t;
}

std::string error_json(const std::string& type, const std::string& message) {
  nlohmann::json j;
  j["error"] = {{"type", type}, {"message", message}};
  return j.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace fewcycle
