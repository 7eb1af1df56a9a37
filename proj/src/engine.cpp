#include "fewcycle/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace fewcycle {

namespace {

std::atomic<std::uint64_t> g_integrate_calls{0};

using Cplx = std::complex<double>;

struct State {
  Cplx c, d;
};

State operator+(State a, State b) { return {a.c + b.c, a.d + b.d}; }
State operator*(double s, State a) { return {s * a.c, s * a.d}; }

// Drive field restricted to one envelope piece (or free evolution when the
// window lies outside the support); no branch selection happens per stage,
// so stage times that spill a few ulp over the piece edge stay smooth.
struct PieceField {
  const PulseSpec* pulse;
  std::optional<std::size_t> piece; // nullopt: field is zero here
  double omega_c;

  State rhs(double t, const State& y) const {
    if (!piece) return {Cplx{0.0, 0.0}, Cplx{0.0, 0.0}};
    const double om = segment_field(*pulse, *piece, t);
    const Cplx e{std::cos(omega_c * t), std::sin(omega_c * t)};
    static constexpr Cplx mi{0.0, -1.0};
    return {mi * om * e * y.d, mi * om * std::conj(e) * y.c};
  }
};

State rk4_step(const PieceField& f, double t, double h, const State& y) {
  const State k1 = f.rhs(t, y);
  const State k2 = f.rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = f.rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = f.rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Recorder {
  Trajectory* traj;
  void push(double t, const State& y) {
    const double cp = std::norm(y.c);
    const double n = cp + std::norm(y.d);
    traj->times.push_back(t);
    traj->c_amp.push_back(y.c);
    traj->d_amp.push_back(y.d);
    traj->norm.push_back(n);
    traj->c_prob.push_back(cp);
    traj->w.push_back(2.0 * cp - 1.0);
    const bool ok = std::abs(y.d) > kDivisionGuard;
    traj->f_valid.push_back(ok ? 1 : 0);
    traj->f_ratio.push_back(ok ? y.c / y.d : Cplx{0.0, 0.0});
    traj->max_norm_deviation = std::max(traj->max_norm_deviation, std::abs(n - 1.0));
  }
};

void audit_norm(const State& y, double t) {
  const double dev = std::abs(std::norm(y.c) + std::norm(y.d) - 1.0);
  if (dev > kNormRejectTol) throw NormDriftError(dev, t);
}

// Maps a window [lo, hi] to the envelope piece containing it, by midpoint.
std::optional<std::size_t> piece_for(const PulseSpec& pulse,
                                     const std::vector<double>& bounds,
                                     double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  if (mid < pulse.t_start || mid > pulse.t_end) return std::nullopt;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
    if (mid <= bounds[i + 1]) return i;
  return bounds.size() - 2;
}

constexpr double kDopC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kDopA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kDopB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                              -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kDopB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695,
                              393.0 / 640,       -92097.0 / 339200,
                              187.0 / 2100,      1.0 / 40};

// One accepted embedded 5(4) step; h is updated in place (signed).
State dopri_step(const PieceField& f, double& t, double& h, double dir,
                 double h_floor, double h_cap, const State& y,
                 const IntegratorConfig& cfg) {
  for (;;) {
    if (std::abs(h) < h_floor) throw StepUnderflowError(t);
    State k[7];
    k[0] = f.rhs(t, y);
    for (int s = 1; s < 7; ++s) {
      State acc = y;
      for (int j = 0; j < s; ++j) acc = acc + (h * kDopA[s][j]) * k[j];
      k[s] = f.rhs(t + kDopC[s] * h, acc);
    }
    State y5 = y, err{};
    for (int s = 0; s < 7; ++s) {
      y5 = y5 + (h * kDopB5[s]) * k[s];
      err = err + (h * (kDopB5[s] - kDopB4[s])) * k[s];
    }
    const double sc_c =
        cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.c), std::abs(y5.c));
    const double sc_d =
        cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.d), std::abs(y5.d));
    const double en = std::sqrt(0.5 * (std::norm(err.c / sc_c) + std::norm(err.d / sc_d)));
    if (en <= 1.0) {
      t += h;
      const double grow = (en == 0.0) ? 5.0 : 0.9 * std::pow(en, -0.2);
      h = dir * std::min(h_cap, std::abs(h) * std::clamp(grow, 0.2, 5.0));
      return y5;
    }
    h *= std::clamp(0.9 * std::pow(en, -0.2), 0.2, 0.9);
  }
}

} // namespace

void validate(const IntegratorConfig& cfg) {
  if (cfg.steps_per_cycle < 100)
    throw std::invalid_argument("steps_per_cycle must be >= 100");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be > 0");
  if (cfg.norm_check_interval < 1)
    throw std::invalid_argument("norm_check_interval must be >= 1");
}

NormDriftError::NormDriftError(double dev, double t)
    : std::runtime_error("norm drift " + std::to_string(dev) + " at t = " +
                         std::to_string(t)),
      deviation(dev), at_time(t) {}

StepUnderflowError::StepUnderflowError(double t)
    : std::runtime_error("adaptive step underflow at t = " + std::to_string(t)),
      at_time(t) {}

DivisionGuardError::DivisionGuardError(double t)
    : std::runtime_error("|D| below division guard at t = " + std::to_string(t)),
      at_time(t) {}

Trajectory integrate_tls(const PulseSpec& pulse, const TlsParams& tls,
                         const IntegratorConfig& cfg) {
  return integrate_tls_window(pulse, tls, cfg, pulse.t_start, pulse.t_end,
                              {0.0, 0.0}, {1.0, 0.0});
}

Trajectory integrate_tls_window(const PulseSpec& pulse, const TlsParams& tls,
                                const IntegratorConfig& cfg, double t0, double t1,
                                std::complex<double> c0, std::complex<double> d0) {
  g_integrate_calls.fetch_add(1, std::memory_order_relaxed);
  validate(pulse);
  validate(cfg);
  if (!(tls.transition_freq > 0.0))
    throw std::invalid_argument("transition_freq must be > 0");
  if (t0 == t1) throw std::invalid_argument("empty integration window");

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  const std::vector<double> pieces = segment_boundaries(pulse);
  std::vector<double> cuts{lo, hi};
  for (double b : pieces)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  if (dir < 0) std::reverse(cuts.begin(), cuts.end());

  const double period = pulse.period();
  Trajectory traj;
  Recorder rec{&traj};
  State y{c0, d0};
  rec.push(t0, y);
  long steps_done = 0;

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    PieceField field{&pulse, piece_for(pulse, pieces, std::min(a, b), std::max(a, b)),
                     tls.transition_freq};
    if (cfg.mode == StepMode::FixedStep) {
      const long n = std::max<long>(
          1, std::llround(cfg.steps_per_cycle * std::abs(b - a) / period));
      const double h = (b - a) / static_cast<double>(n);
      for (long k = 0; k < n; ++k) {
        const double t = a + static_cast<double>(k) * h;
        y = rk4_step(field, t, h, y);
        const double t_node = (k + 1 == n) ? b : a + static_cast<double>(k + 1) * h;
        rec.push(t_node, y);
        if (++steps_done % cfg.norm_check_interval == 0) audit_norm(y, t_node);
      }
    } else {
      double t = a;
      double h = dir * std::min(std::abs(b - a), period / 100.0);
      const double h_floor = 1e-15 * period;
      const double h_cap = std::abs(b - a);
      // A clamped final step can land a few ulp short of b; treat that as
      // arrival rather than asking the controller for a sub-floor step.
      const double edge = 8.0 * std::numeric_limits<double>::epsilon() *
                          (std::abs(a) + std::abs(b) + 1.0);
      while (dir * (b - t) > edge) {
        if (dir * (t + h - b) > 0.0) h = b - t;
        y = dopri_step(field, t, h, dir, h_floor, h_cap, y, cfg);
        if (dir * (b - t) <= edge) t = b;
        rec.push(t, y);
        if (++steps_done % cfg.norm_check_interval == 0) audit_norm(y, t);
      }
    }
    audit_norm(y, b);
  }
  return traj;
}

std::uint64_t integrate_call_count() {
  return g_integrate_calls.load(std::memory_order_relaxed);
}

QuadResult theta_quadrature(double t, const PulseSpec& pulse, const TlsParams& tls,
                            double abs_tol) {
  validate(pulse);
  if (t <= pulse.t_start) return {};
  const double upper = std::min(t, pulse.t_end);
  const double wc = tls.transition_freq;
  const auto integrand = [&](double u) -> std::complex<double> {
    return field(pulse, u) * std::complex<double>{std::cos(wc * u), std::sin(wc * u)};
  };
  return integrate_gk_segmented(integrand, pulse.t_start, upper,
                                segment_boundaries(pulse), abs_tol);
}

std::vector<double> riccati_residual(const std::vector<double>& times,
                                     const std::vector<std::complex<double>>& f,
                                     const PulseSpec& pulse, const TlsParams& tls) {
  const std::size_t n = times.size();
  if (f.size() != n) throw std::invalid_argument("times/f size mismatch");
  std::vector<double> res(n, std::numeric_limits<double>::quiet_NaN());
  if (n < 3) return res;
  const double wc = tls.transition_freq;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = times[i] - times[i - 1];
    const double hr = times[i + 1] - times[i];
    if (std::abs(hr - hl) > 1e-9 * std::max(std::abs(hl), std::abs(hr))) continue;
    const std::complex<double> fd = (f[i + 1] - f[i - 1]) / (times[i + 1] - times[i - 1]);
    const double om = field(pulse, times[i]);
    const std::complex<double> e{std::cos(wc * times[i]), std::sin(wc * times[i])};
    static constexpr std::complex<double> im{0.0, 1.0};
    res[i] = std::abs(fd - im * om * std::conj(e) * f[i] * f[i] + im * om * e);
  }
  return res;
}

std::vector<double> riccati_residual(const Trajectory& traj, const PulseSpec& pulse,
                                     const TlsParams& tls) {
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (!traj.f_valid[i]) throw DivisionGuardError(traj.times[i]);
  return riccati_residual(traj.times, traj.f_ratio, pulse, tls);
}

FinalState final_state(const Trajectory& traj) {
  if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
  const std::size_t i = traj.size() - 1;
  if (!traj.f_valid[i]) throw DivisionGuardError(traj.times[i]);
  return {traj.c_prob[i], traj.w[i], traj.f_ratio[i]};
}

} // namespace fewcycle
