#include "fewcycle/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace fewcycle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Numeric final state for the standard campaign pulse (carrier = 1).
FinalState run_numeric(Shape shape, double field_ratio, double cep, double cycles,
                       double detuning, const IntegratorConfig& cfg) {
  const PulseSpec pulse = make_pulse(shape, field_ratio, cep, cycles);
  return final_state(integrate_tls(pulse, tls_from_detuning_ratio(detuning), cfg));
}

} // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n, bool include_end) {
  std::vector<double> v(n);
  if (n == 0) return v;
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(include_end ? n - 1 : n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
  if (include_end) v[n - 1] = hi;
  return v;
}

void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t n_workers = workers > 0 ? static_cast<std::size_t>(workers)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, count);
  if (n_workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += n_workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

TraceComparison trace_compare(double detuning, double field_ratio, double cep,
                              double cycles, const IntegratorConfig& cfg) {
  const PulseSpec pulse = make_pulse(Shape::Square, field_ratio, cep, cycles);
  const TlsParams tls = tls_from_detuning_ratio(detuning);
  const Trajectory traj = integrate_tls(pulse, tls, cfg);

  TraceComparison out;
  out.times = traj.times;
  out.f_abs_numeric.resize(traj.size());
  out.f_abs_analytic.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!traj.f_valid[i]) throw DivisionGuardError(traj.times[i]);
    out.f_abs_numeric[i] = std::abs(traj.f_ratio[i]);
    const GuardedComplex g = f_analytic(traj.times[i], pulse, tls);
    out.f_abs_analytic[i] = std::abs(g.value);
    out.regime_warning = g.regime_warning;
    out.validity_metric = g.validity_metric;
    out.max_gap = std::max(out.max_gap,
                           std::abs(out.f_abs_analytic[i] - out.f_abs_numeric[i]));
  }
  out.meta = make_manifest("trace-compare", pulse, detuning, cfg);
  return out;
}

std::vector<SweepRecord> detuning_scan(double field_ratio,
                                       const std::vector<double>& detunings,
                                       double cep, long n_cycles,
                                       const IntegratorConfig& cfg, int workers) {
  const double cycles = static_cast<double>(n_cycles);
  std::vector<SweepRecord> records(detunings.size());
  parallel_for_index(detunings.size(), workers, [&](std::size_t i) {
    const double r = detunings[i];
    SweepRecord& rec = records[i];
    rec.param = r;
    try {
      const PulseSpec pulse = make_pulse(Shape::Square, field_ratio, cep, cycles);
      const TlsParams tls = tls_from_detuning_ratio(r);
      rec.analytic = upper_prob_from_f(f_analytic(pulse.t_end, pulse, tls).value);
      rec.numeric = run_numeric(Shape::Square, field_ratio, cep, cycles, r, cfg).c_prob;
      rec.difference = std::abs(rec.analytic - rec.numeric);
    } catch (const std::exception&) {
      rec.analytic = rec.numeric = rec.difference = kNaN;
    }
  });
  return records;
}

AgreementMap agreement_map(const std::vector<double>& field_grid,
                           const std::vector<double>& detuning_grid, double cep,
                           long n_cycles, const IntegratorConfig& cfg, int workers) {
  if (field_grid.empty() || detuning_grid.empty())
    throw std::invalid_argument("agreement_map: empty grid");
  AgreementMap out;
  out.map.x_axis = {"field_ratio", field_grid};
  out.map.y_axis = {"detuning", detuning_grid};
  out.map.values.assign(field_grid.size() * detuning_grid.size(), kNaN);
  const double cycles = static_cast<double>(n_cycles);
  const std::size_t nx = field_grid.size();

  std::atomic<std::size_t> failures{0};
  parallel_for_index(out.map.values.size(), workers, [&](std::size_t idx) {
    const std::size_t iy = idx / nx, ix = idx % nx;
    const double a = field_grid[ix], r = detuning_grid[iy];
    try {
      const PulseSpec pulse = make_pulse(Shape::Square, a, cep, cycles);
      const TlsParams tls = tls_from_detuning_ratio(r);
      const double c_analytic = std::sqrt(
          upper_prob_from_f(f_analytic(pulse.t_end, pulse, tls).value));
      const Trajectory traj = integrate_tls(pulse, tls, cfg);
      const double c_numeric = std::abs(traj.c_amp.back());
      out.map.values[idx] = std::abs(c_analytic - c_numeric);
    } catch (const std::exception&) {
      failures.fetch_add(1, std::memory_order_relaxed);
    }
  });
  out.failed_cells = failures.load();

  out.guideline_detuning.resize(nx);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double a2 = field_grid[ix] * field_grid[ix];
    const double r2 = kValidityGuideline - a2;
    out.guideline_detuning[ix] =
        (r2 > 0.0 && r2 < 1.0) ? std::sqrt(r2) : kNaN;
  }

  const PulseSpec proto = make_pulse(Shape::Square, field_grid.front(), cep, cycles);
  out.map.meta = make_manifest("agreement-map", proto, kNaN, cfg);
  out.map.meta.field_ratio = kNaN;
  out.map.meta.notes["x_axis"] = "field_ratio [" + fmt(field_grid.front()) + ", " +
                                 fmt(field_grid.back()) + "] n=" +
                                 std::to_string(nx);
  out.map.meta.notes["y_axis"] = "detuning [" + fmt(detuning_grid.front()) + ", " +
                                 fmt(detuning_grid.back()) + "] n=" +
                                 std::to_string(detuning_grid.size());
  out.map.meta.notes["observable"] = "abs(|C|_analytic - |C|_numeric) at pulse end";
  out.map.meta.notes["guideline"] = "validity metric level set r^2 + a^2 = 0.5";
  return out;
}

std::vector<SweepRecord> cep_sweep(Shape shape, double detuning, double field_ratio,
                                   double cycles, const std::vector<double>& phis,
                                   const IntegratorConfig& cfg, int workers,
                                   SweepEngines engines) {
  const bool want_analytic = engines != SweepEngines::NumericOnly;
  const bool want_numeric = engines != SweepEngines::AnalyticOnly;
  const long n = std::lround(cycles);
  const bool analytic_ok = shape == Shape::Square && n >= 1 &&
                           std::abs(cycles - static_cast<double>(n)) <= 1e-9;
  std::vector<SweepRecord> records(phis.size());
  parallel_for_index(phis.size(), workers, [&](std::size_t i) {
    SweepRecord& rec = records[i];
    rec.param = phis[i];
    rec.analytic = rec.numeric = rec.difference = kNaN;
    try {
      if (want_analytic && analytic_ok) {
        const PulseSpec pulse = make_pulse(shape, field_ratio, phis[i], cycles);
        rec.analytic = final_inversion_analytic(phis[i], n, pulse,
                                                tls_from_detuning_ratio(detuning))
                           .delta_w;
      }
      if (want_numeric) {
        const double w =
            run_numeric(shape, field_ratio, phis[i], cycles, detuning, cfg).w;
        rec.numeric = 0.5 * (w + 1.0);
      }
      if (want_analytic && want_numeric && analytic_ok)
        rec.difference = std::abs(rec.analytic - rec.numeric);
    } catch (const std::exception&) {
      rec.analytic = rec.numeric = rec.difference = kNaN;
    }
  });
  return records;
}

std::vector<FieldSweepCurve> field_sweep(Shape shape, const std::vector<double>& ceps,
                                         const std::vector<double>& field_grid,
                                         double detuning, double cycles,
                                         const IntegratorConfig& cfg, int workers,
                                         SweepEngines engines) {
  const bool want_analytic = engines != SweepEngines::NumericOnly;
  const bool want_numeric = engines != SweepEngines::AnalyticOnly;
  const long n = std::lround(cycles);
  const bool analytic_ok = shape == Shape::Square && n >= 1 &&
                           std::abs(cycles - static_cast<double>(n)) <= 1e-9;

  std::vector<FieldSweepCurve> curves(ceps.size());
  const std::size_t na = field_grid.size();
  for (std::size_t c = 0; c < ceps.size(); ++c) {
    curves[c].cep = ceps[c];
    curves[c].records.resize(na);
  }
  parallel_for_index(ceps.size() * na, workers, [&](std::size_t idx) {
    const std::size_t c = idx / na, ia = idx % na;
    const double phi = ceps[c], a = field_grid[ia];
    SweepRecord& rec = curves[c].records[ia];
    rec.param = a;
    rec.analytic = rec.numeric = rec.difference = kNaN;
    try {
      if (want_analytic && analytic_ok) {
        const PulseSpec pulse = make_pulse(shape, a, phi, cycles);
        rec.analytic =
            final_inversion_analytic(phi, n, pulse, tls_from_detuning_ratio(detuning))
                .w_f;
      }
      if (want_numeric)
        rec.numeric = run_numeric(shape, a, phi, cycles, detuning, cfg).w;
      if (want_analytic && want_numeric && analytic_ok)
        rec.difference = std::abs(rec.analytic - rec.numeric);
    } catch (const std::exception&) {
      rec.analytic = rec.numeric = rec.difference = kNaN;
    }
  });
  for (FieldSweepCurve& curve : curves) {
    std::vector<double> num(na), ana(na);
    for (std::size_t i = 0; i < na; ++i) {
      num[i] = curve.records[i].numeric;
      ana[i] = curve.records[i].analytic;
    }
    curve.numeric_minima = local_minima(num);
    curve.analytic_minima = local_minima(ana);
  }
  return curves;
}

std::vector<std::size_t> local_minima(const std::vector<double>& curve) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double a = curve[i - 1], b = curve[i], c = curve[i + 1];
    if (std::isnan(a) || std::isnan(b) || std::isnan(c)) continue;
    if (b < a && b < c) idx.push_back(i);
  }
  return idx;
}

CosSqFit fit_cos_sq(const std::vector<double>& phis, const std::vector<double>& ys) {
  // Normal equations for y = amplitude*cos^2(phi) + offset.
  const std::size_t n = phis.size();
  if (n < 2 || ys.size() != n)
    throw std::invalid_argument("fit_cos_sq: need >= 2 aligned points");
  double sxx = 0.0, sx = 0.0, sxy = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(phis[i]);
    const double x = c * c;
    sxx += x * x;
    sx += x;
    sxy += x * ys[i];
    sy += ys[i];
  }
  const double nn = static_cast<double>(n);
  const double det = sxx * nn - sx * sx;
  CosSqFit fit;
  if (std::abs(det) < 1e-30) {
    fit.offset = sy / nn;
  } else {
    fit.amplitude = (sxy * nn - sx * sy) / det;
    fit.offset = (sxx * sy - sx * sxy) / det;
  }
  const double mean = sy / nn;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(phis[i]);
    const double r = ys[i] - (fit.amplitude * c * c + fit.offset);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
    ss_res += r * r;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

} // namespace fewcycle
