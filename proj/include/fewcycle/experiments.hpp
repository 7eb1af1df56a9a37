#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fewcycle/analytic.hpp"
#include "fewcycle/engine.hpp"
#include "fewcycle/manifest.hpp"
#include "fewcycle/pulse.hpp"

namespace fewcycle {

// Evenly spaced grid; include_end=false leaves the right endpoint out
// (step (hi-lo)/n instead of (hi-lo)/(n-1)).
std::vector<double> linspace(double lo, double hi, std::size_t n,
                             bool include_end = true);

// Runs body(0..count-1) on `workers` threads (0 = hardware concurrency).
// Bodies write to disjoint slots, so results are ordered by index and
// independent of scheduling.  The first exception thrown by a body is
// rethrown after all workers join.
void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& body);

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct GridMap {
  Axis x_axis, y_axis;
  std::vector<double> values; // row-major, y outer: values[iy*nx + ix]
  RunManifest meta;
  std::size_t nx() const { return x_axis.values.size(); }
  std::size_t ny() const { return y_axis.values.size(); }
  double& at(std::size_t iy, std::size_t ix) { return values[iy * nx() + ix]; }
  double at(std::size_t iy, std::size_t ix) const { return values[iy * nx() + ix]; }
};

// One scan point: the swept parameter, both engine values, and their
// absolute difference (NaN marks an engine not run or a failed point).
struct SweepRecord {
  double param = 0.0;
  double analytic = 0.0;
  double numeric = 0.0;
  double difference = 0.0;
};

enum class SweepEngines { Both, AnalyticOnly, NumericOnly };

// |f(t)| from the closed form vs the integrated trajectory on the
// trajectory's own time grid (square pulse).
struct TraceComparison {
  std::vector<double> times;
  std::vector<double> f_abs_analytic;
  std::vector<double> f_abs_numeric;
  double max_gap = 0.0;
  bool regime_warning = false;
  double validity_metric = 0.0;
  RunManifest meta;
};

TraceComparison trace_compare(double detuning, double field_ratio, double cep,
                              double cycles, const IntegratorConfig& cfg = {});

// Final upper-level probability vs the detuning ratio at fixed field
// (square pulse, both engines).  Failed points become NaN records.
std::vector<SweepRecord> detuning_scan(double field_ratio,
                                       const std::vector<double>& detunings,
                                       double cep, long n_cycles,
                                       const IntegratorConfig& cfg = {},
                                       int workers = 0);

// |analytic - numeric| of the final upper-amplitude modulus |C| over a
// field x detuning grid, plus the small-parameter guideline r(a) solving
// r^2 + a^2 = 0.5 for the overlay (NaN where no solution in (0,1)).
struct AgreementMap {
  GridMap map;
  std::vector<double> guideline_detuning; // one entry per x (field) value
  std::size_t failed_cells = 0;
};

AgreementMap agreement_map(const std::vector<double>& field_grid,
                           const std::vector<double>& detuning_grid, double cep,
                           long n_cycles, const IntegratorConfig& cfg = {},
                           int workers = 0);

// Final-inversion shift (w_f + 1)/2 vs CEP.  The analytic side applies to
// square pulses with integer cycle counts and is NaN otherwise.
std::vector<SweepRecord> cep_sweep(Shape shape, double detuning, double field_ratio,
                                   double cycles, const std::vector<double>& phis,
                                   const IntegratorConfig& cfg = {}, int workers = 0,
                                   SweepEngines engines = SweepEngines::Both);

// w_f vs peak field at fixed CEP, one curve per CEP value, with strict
// interior local minima of each curve marked.
struct FieldSweepCurve {
  double cep = 0.0;
  std::vector<SweepRecord> records; // param = field ratio
  std::vector<std::size_t> numeric_minima;
  std::vector<std::size_t> analytic_minima;
};

std::vector<FieldSweepCurve> field_sweep(Shape shape, const std::vector<double>& ceps,
                                         const std::vector<double>& field_grid,
                                         double detuning, double cycles,
                                         const IntegratorConfig& cfg = {},
                                         int workers = 0,
                                         SweepEngines engines = SweepEngines::Both);

// Strict interior local minima (both neighbors larger, NaN-free triples).
std::vector<std::size_t> local_minima(const std::vector<double>& curve);

// Least-squares fit y ~ a*cos^2(phi) + b.  Returns {a, b, max abs residual,
// r_squared}.
struct CosSqFit {
  double amplitude = 0.0;
  double offset = 0.0;
  double max_residual = 0.0;
  double r_squared = 1.0;
};
CosSqFit fit_cos_sq(const std::vector<double>& phis, const std::vector<double>& ys);

} // namespace fewcycle
