#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fewcycle/engine.hpp"
#include "fewcycle/experiments.hpp"
#include "fewcycle/manifest.hpp"

namespace fewcycle {

// 17 significant digits: round-trips any double exactly.
std::string format_g17(double v);

// Accepts literal radians ("1.5707") or multiples of pi ("0.5pi", "-pi",
// "2pi").  Throws std::invalid_argument on anything else.
double parse_angle(const std::string& text);

// "lo:hi:n" with angle syntax allowed for lo and hi.  include_end=true
// spaces n points across [lo, hi]; false leaves hi out (step (hi-lo)/n).
std::vector<double> parse_range(const std::string& text, bool include_end = true);

// Column-named numeric table; the single exchange format for every
// emitter.  NaN cells mark engines not run or failed points.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Quotes a field per RFC 4180 when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// CSV: header row + %.17g data rows, LF line endings.
void write_table_csv(const std::string& path, const Table& t);

// JSON: {"manifest": <stable manifest>, "columns": [...], "rows": [[...]]}.
// NaN serializes as null.
void write_table_json(const std::string& path, const Table& t,
                      const RunManifest& m);

// Sidecar at path + ".manifest.json" with the full (wall-clock-bearing)
// manifest.  Data files stay byte-stable; the sidecar does not.
void write_manifest_sidecar(const std::string& path, const RunManifest& m);

// Matrix-layout CSV for a grid map: first column the y axis, one column per
// x value, header "y_name\x_name" in the corner cell.
void write_gridmap_csv(const std::string& path, const GridMap& map);

using ConstCols = std::vector<std::pair<std::string, double>>;

Table trajectory_table(const Trajectory& traj);
Table trace_table(const TraceComparison& tc, const ConstCols& extras = {});
Table sweep_table(const std::vector<SweepRecord>& recs,
                  const std::string& param_name, const std::string& analytic_name,
                  const std::string& numeric_name, const ConstCols& extras = {});
Table field_sweep_table(const std::vector<FieldSweepCurve>& curves,
                        const ConstCols& extras = {});
Table gridmap_long_table(const GridMap& map);
Table guideline_table(const AgreementMap& am);

// {"error": {"type": ..., "message": ...}} for machine-readable stderr.
std::string error_json(const std::string& type, const std::string& message);

std::string read_file(const std::string& path); // throws std::runtime_error

} // namespace fewcycle
