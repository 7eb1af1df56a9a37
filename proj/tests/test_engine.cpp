#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fewcycle/analytic.hpp"
#include "fewcycle/engine.hpp"

using namespace fewcycle;

namespace {
constexpr double kPi = std::numbers::pi;
using Cplx = std::complex<double>;

IntegratorConfig fixed_cfg(int spc) {
  IntegratorConfig cfg;
  cfg.steps_per_cycle = spc;
  return cfg;
}
}

TEST_CASE("trajectory starts in the ground state") {
  const Trajectory traj = integrate_tls(make_pulse(Shape::Square, 0.05, 0.0, 2.0),
                                        tls_from_detuning_ratio(0.3), fixed_cfg(500));
  REQUIRE(traj.size() > 0);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.c_amp.front() == Cplx{0.0, 0.0});
  CHECK(traj.d_amp.front() == Cplx{1.0, 0.0});
  CHECK(traj.w.front() == -1.0);
  CHECK(traj.norm.front() == 1.0);
  CHECK(traj.times.back() == doctest::Approx(4.0 * kPi).epsilon(1e-15));
}

TEST_CASE("fixed-step node layout is deterministic") {
  const Trajectory sq = integrate_tls(make_pulse(Shape::Square, 0.05, 0.0, 2.0),
                                      tls_from_detuning_ratio(0.3), fixed_cfg(2000));
  CHECK(sq.size() == 4001); // 2000 steps/cycle x 2 cycles + initial node
  const Trajectory th = integrate_tls(make_pulse(Shape::TopHat, 0.05, 0.0, 2.0),
                                      tls_from_detuning_ratio(0.3), fixed_cfg(2000));
  CHECK(th.size() == 4001); // ramps live inside the cycle count: 0.5 T + T + 0.5 T
}

TEST_CASE("norm stays pinned to one") {
  for (const auto& [a, r] : {std::pair{0.05, 0.3}, {0.2, 0.9}, {0.1, 0.6}}) {
    const Trajectory traj = integrate_tls(make_pulse(Shape::Square, a, 0.0, 2.0),
                                          tls_from_detuning_ratio(r), fixed_cfg(2000));
    CHECK(traj.max_norm_deviation <= 1e-8);
  }
}

TEST_CASE("weak-drive final state matches the frozen oracle") {
  const Trajectory traj = integrate_tls(make_pulse(Shape::Square, 0.05, 0.0, 2.0),
                                        tls_from_detuning_ratio(0.3), fixed_cfg(2000));
  CHECK(traj.c_prob.back() == doctest::Approx(8.085960995760e-4).epsilon(1e-7));
  // First-order closed form sits close by at this weak point.
  const double analytic = upper_prob_from_f(
      f_analytic(traj.times.back(),
                 make_pulse(Shape::Square, 0.05, 0.0, 2.0),
                 tls_from_detuning_ratio(0.3))
          .value);
  CHECK(analytic == doctest::Approx(8.144332465087e-4).epsilon(1e-7));
  CHECK(std::abs(traj.c_prob.back() - analytic) < 1e-5);
}

TEST_CASE("backward integration undoes the pulse") {
  const PulseSpec p = make_pulse(Shape::Square, 0.1, 0.0, 2.0);
  const TlsParams tls = tls_from_detuning_ratio(0.6);
  const Trajectory fwd = integrate_tls(p, tls, fixed_cfg(2000));
  const Trajectory back =
      integrate_tls_window(p, tls, fixed_cfg(2000), p.t_end, 0.0,
                           fwd.c_amp.back(), fwd.d_amp.back());
  CHECK(std::abs(back.c_amp.back()) < 1e-9);
  CHECK(std::abs(back.d_amp.back() - Cplx{1.0, 0.0}) < 1e-9);
}

TEST_CASE("a support shifted by whole carrier periods changes nothing") {
  const PulseSpec p = make_pulse(Shape::Gaussian, 0.15, 0.2, 1.0);
  PulseSpec shifted = p;
  shifted.t_start += 6.0 * kPi; // three carrier periods
  shifted.t_end += 6.0 * kPi;
  const TlsParams tls = tls_from_detuning_ratio(0.6);
  const double base = integrate_tls(p, tls, fixed_cfg(1000)).c_prob.back();
  const double moved = integrate_tls(shifted, tls, fixed_cfg(1000)).c_prob.back();
  CHECK(std::abs(base - moved) < 1e-10);
}

TEST_CASE("adaptive mode reproduces fixed-step results") {
  const PulseSpec p = make_pulse(Shape::Square, 0.1, 0.4, 2.0);
  const TlsParams tls = tls_from_detuning_ratio(0.6);
  IntegratorConfig ad;
  ad.mode = StepMode::Adaptive;
  const double fixed = integrate_tls(p, tls, fixed_cfg(4000)).c_prob.back();
  const Trajectory traj = integrate_tls(p, tls, ad);
  CHECK(std::abs(traj.c_prob.back() - fixed) < 1e-8);
  CHECK(traj.max_norm_deviation <= 1e-8);
  CHECK(traj.times.back() == p.t_end); // lands on the boundary exactly

  // Multi-segment envelope with ramp joins exercises the end-of-segment clamp.
  const PulseSpec th_pulse = make_pulse(Shape::TopHat, 0.15, 0.0, 2.0);
  const Trajectory th = integrate_tls(th_pulse, tls, ad);
  CHECK(th.max_norm_deviation <= 1e-8);
  CHECK(th.times.back() == th_pulse.t_end);
}

TEST_CASE("configuration and window guards") {
  const PulseSpec p = make_pulse(Shape::Square, 0.05, 0.0, 1.0);
  const TlsParams tls = tls_from_detuning_ratio(0.5);
  IntegratorConfig bad = fixed_cfg(50); // below the resolution floor
  CHECK_THROWS_AS(integrate_tls(p, tls, bad), std::invalid_argument);
  bad = fixed_cfg(500);
  bad.norm_check_interval = 0;
  CHECK_THROWS_AS(integrate_tls(p, tls, bad), std::invalid_argument);
  bad = fixed_cfg(500);
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate_tls(p, tls, bad), std::invalid_argument);
  CHECK_THROWS_AS(integrate_tls(p, TlsParams{0.0}, fixed_cfg(500)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      integrate_tls_window(p, tls, fixed_cfg(500), 1.0, 1.0, {0, 0}, {1, 0}),
      std::invalid_argument);
}

TEST_CASE("norm drift is rejected, not propagated") {
  const PulseSpec p = make_pulse(Shape::Square, 0.05, 0.0, 1.0);
  const TlsParams tls = tls_from_detuning_ratio(0.5);
  // Start from an unnormalized state: the audit must fire.
  CHECK_THROWS_AS(integrate_tls_window(p, tls, fixed_cfg(500), 0.0, p.t_end,
                                       {1.0, 0.0}, {1.0, 0.0}),
                  NormDriftError);
}

TEST_CASE("f is guarded where the lower amplitude vanishes") {
  const PulseSpec p = make_pulse(Shape::Square, 0.0, 0.0, 1.0); // free evolution
  const TlsParams tls = tls_from_detuning_ratio(0.5);
  const Trajectory traj =
      integrate_tls_window(p, tls, fixed_cfg(500), 0.0, p.t_end, {1.0, 0.0},
                           {0.0, 0.0});
  REQUIRE(traj.size() > 0);
  CHECK_FALSE(traj.f_valid.back());
  CHECK_THROWS_AS(final_state(traj), DivisionGuardError);
  CHECK_THROWS_AS(riccati_residual(traj, p, tls), DivisionGuardError);
}

TEST_CASE("phase-integral quadrature hits zero at and before the start") {
  const PulseSpec p = make_pulse(Shape::Square, 0.1, 0.0, 2.0);
  const TlsParams tls = tls_from_detuning_ratio(0.3);
  CHECK(theta_quadrature(0.0, p, tls).value == Cplx{0.0, 0.0});
  CHECK(theta_quadrature(-3.0, p, tls).value == Cplx{0.0, 0.0});
}

TEST_CASE("riccati residual: small, second-order, NaN at ends") {
  const PulseSpec p = make_pulse(Shape::Square, 0.05, 0.0, 2.0);
  const TlsParams tls = tls_from_detuning_ratio(0.3);
  const auto max_finite = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
      if (std::isfinite(x)) m = std::max(m, x);
    return m;
  };
  const std::vector<double> res =
      riccati_residual(integrate_tls(p, tls, fixed_cfg(2000)), p, tls);
  CHECK(std::isnan(res.front()));
  CHECK(std::isnan(res.back()));
  const double coarse_max =
      max_finite(riccati_residual(integrate_tls(p, tls, fixed_cfg(1000)), p, tls));
  const double fine_max = max_finite(res);
  CHECK(fine_max < 1e-4 * 0.05);
  const double ratio = coarse_max / fine_max;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("externally sampled f: spacing and size guards") {
  const PulseSpec p = make_pulse(Shape::Square, 0.05, 0.0, 1.0);
  const TlsParams tls = tls_from_detuning_ratio(0.5);
  const std::vector<double> uneven{0.0, 0.1, 0.3, 0.4};
  const std::vector<Cplx> f(4, Cplx{0.0, 0.0});
  const std::vector<double> res = riccati_residual(uneven, f, p, tls);
  for (double x : res) CHECK(std::isnan(x)); // ends + both uneven interiors
  CHECK_THROWS_AS(riccati_residual(std::vector<double>{0.0, 0.1}, f, p, tls),
                  std::invalid_argument);
}

TEST_CASE("window-call counter advances with each integration") {
  const PulseSpec p = make_pulse(Shape::Square, 0.05, 0.0, 1.0);
  const TlsParams tls = tls_from_detuning_ratio(0.5);
  const std::uint64_t before = integrate_call_count();
  (void)integrate_tls(p, tls, fixed_cfg(500));
  (void)integrate_tls(p, tls, fixed_cfg(500));
  CHECK(integrate_call_count() == before + 2);
}
