#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fewcycle/analytic.hpp"
#include "fewcycle/engine.hpp"

using namespace fewcycle;

namespace {
constexpr double kPi = std::numbers::pi;
using Cplx = std::complex<double>;

// Strong-modulation reference point used by the CEP studies.
const PulseSpec kRefPulse = make_pulse(Shape::Square, 0.181, 0.0, 2.0);
const TlsParams kRefTls = tls_from_detuning_ratio(0.366);
}

TEST_CASE("phase integral vanishes identically at t = 0") {
  CHECK(std::abs(theta_closed(0.0, kRefPulse, kRefTls)) == 0.0);
}

TEST_CASE("closed form matches adaptive quadrature of the drive") {
  for (const auto& [a, r] : {std::pair{0.05, 0.3}, {0.2, 0.9}, {0.15, 0.6}}) {
    const PulseSpec p = make_pulse(Shape::Square, a, 0.4, 2.0);
    const TlsParams tls = tls_from_detuning_ratio(r);
    for (double frac : {0.21, 0.63, 1.0}) {
      const double t = frac * p.t_end;
      const Cplx cf = theta_closed(t, p, tls);
      const QuadResult q = theta_quadrature(t, p, tls, 1e-13);
      REQUIRE(q.converged);
      CHECK(std::abs(cf - q.value) / std::abs(q.value) < 1e-10);
    }
  }
}

TEST_CASE("closed forms refuse unsupported pulses and times") {
  const PulseSpec g = make_pulse(Shape::Gaussian, 0.1, 0.0, 1.0);
  CHECK_THROWS_AS(theta_closed(1.0, g, kRefTls), std::invalid_argument);
  CHECK_THROWS_AS(theta_closed(-1.0, kRefPulse, kRefTls), std::domain_error);
  CHECK_THROWS_AS(theta_closed(kRefPulse.t_end * 1.5, kRefPulse, kRefTls),
                  std::domain_error);

  PulseSpec shifted = kRefPulse;
  shifted.t_start += 2.0 * kPi;
  shifted.t_end += 2.0 * kPi;
  CHECK_THROWS_AS(theta_closed(7.0, shifted, kRefTls), std::invalid_argument);
}

TEST_CASE("quad of theta carries consistent derivatives and conjugates") {
  const double t = 0.37 * kRefPulse.t_end;
  const ThetaQuad q = theta_quad_closed(t, kRefPulse, kRefTls);
  CHECK(q.theta == theta_closed(t, kRefPulse, kRefTls));
  CHECK(q.theta_conj == std::conj(q.theta));
  const Cplx want_dot = 0.181 * std::cos(t) *
                        Cplx{std::cos(kRefTls.transition_freq * t),
                             std::sin(kRefTls.transition_freq * t)};
  CHECK(std::abs(q.theta_dot - want_dot) < 1e-15);
  CHECK(q.theta_dot_conj == std::conj(q.theta_dot));

  // Central-difference cross-check of theta_dot against theta itself.
  const double h = 1e-6;
  const Cplx fd = (theta_closed(t + h, kRefPulse, kRefTls) -
                   theta_closed(t - h, kRefPulse, kRefTls)) /
                  (2.0 * h);
  CHECK(std::abs(fd - q.theta_dot) < 1e-9);
}

TEST_CASE("|theta|^2 closed form agrees with the complex evaluation") {
  const PulseSpec p = make_pulse(Shape::Square, 0.181, 0.4, 2.0);
  for (double frac : {0.11, 0.37, 0.82, 1.0}) {
    const double t = frac * p.t_end;
    const double direct = std::norm(theta_closed(t, p, kRefTls));
    const double formula = theta_sq_exact(t, p, kRefTls);
    CHECK(formula == doctest::Approx(direct).epsilon(1e-12));
  }
  // End-of-pulse specialization.
  CHECK(theta_f_sq_exact(p, kRefTls) ==
        doctest::Approx(theta_sq_exact(p.t_end, p, kRefTls)).epsilon(1e-12));
}

TEST_CASE("flattened end-of-pulse |theta|^2 matches its explicit formula") {
  const PulseSpec p = make_pulse(Shape::Square, 0.181, 0.4, 2.0);
  const DerivedParams d = derive_params(p, kRefTls);
  const double ratio = kRefTls.transition_freq;
  const double want = 2.0 * d.eta * d.eta * std::cos(0.4) * std::cos(0.4) *
                      (1.0 - std::cos(4.0 * ratio * kPi));
  CHECK(theta_f_sq(p, kRefTls) == doctest::Approx(want).epsilon(1e-14));

  // At cep pi/2 the flattened form collapses to (numerically) nothing.
  const PulseSpec p2 = make_pulse(Shape::Square, 0.181, 0.5 * kPi, 2.0);
  CHECK(theta_f_sq(p2, kRefTls) < 1e-30);
}

TEST_CASE("integer-cycle guard") {
  CHECK(require_integer_cycles(make_pulse(Shape::Square, 0.1, 0.0, 2.0)) == 2);
  CHECK(require_integer_cycles(make_pulse(Shape::Square, 0.1, 0.0, 2.0 + 1e-12)) == 2);
  CHECK_THROWS_AS(require_integer_cycles(make_pulse(Shape::Square, 0.1, 0.0, 1.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_integer_cycles(make_pulse(Shape::Square, 0.1, 0.0, 0.4)),
                  std::invalid_argument);
}

TEST_CASE("interference factor: frozen value, bounds, integer-ratio zero") {
  const double q = q_factor(2, kRefPulse, kRefTls);
  CHECK(q == doctest::Approx(3.920580).epsilon(2e-7));
  CHECK(q >= 0.0);
  CHECK(q <= 4.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ad(0.01, 0.4), rd(0.15, 0.9);
  for (int i = 0; i < 50; ++i) {
    const PulseSpec p = make_pulse(Shape::Square, ad(rng), 0.0, 2.0);
    const double v = q_factor(3, p, tls_from_detuning_ratio(rd(rng)));
    CHECK(v >= 0.0);
    CHECK(v <= 4.0);
  }

  // Integer transition/carrier ratio: the detuning factor is an exact zero.
  CHECK(q_factor(2, kRefPulse, TlsParams{3.0}) == 0.0);
  CHECK_THROWS_AS(q_factor(0, kRefPulse, kRefTls), std::invalid_argument);
}

TEST_CASE("final-inversion law at the strong-modulation reference point") {
  const FinalInversionResult r = final_inversion_analytic(0.0, 2, kRefPulse, kRefTls);
  const DerivedParams d = derive_params(kRefPulse, kRefTls);
  CHECK(d.eta * d.eta == doctest::Approx(5.067332e-3).epsilon(1e-6));
  CHECK(r.delta_w == doctest::Approx(0.0194798787).epsilon(1e-8));
  CHECK(r.delta_w == doctest::Approx(0.5 * (r.w_f + 1.0)).epsilon(1e-14));
  // Diagnostic path without the cosh(2 beta) flattening sits a bit higher.
  CHECK(0.5 * (r.w_f_exact_theta + 1.0) ==
        doctest::Approx(0.0224253743).epsilon(1e-8));
  CHECK_FALSE(r.regime_warning);

  // Linearized law differs from the exact ratio by O(X^2).
  const double x = r.q * d.eta * d.eta;
  CHECK(std::abs(r.w_f - r.w_f_linear) <= 2.0 * x * x + 1e-12);
}

TEST_CASE("cep law fixed points") {
  // Quadrature phase kills the shift bitwise.
  CHECK(final_inversion_analytic(0.5 * kPi, 2, kRefPulse, kRefTls).w_f == -1.0);
  // cep 0 and pi give bitwise-identical inversions (cos enters squared).
  CHECK(final_inversion_analytic(0.0, 2, kRefPulse, kRefTls).w_f ==
        final_inversion_analytic(kPi, 2, kRefPulse, kRefTls).w_f);
  // General pi-periodicity holds to rounding.
  for (double phi : {0.3, 0.7, 1.9, 4.2})
    CHECK(std::abs(final_inversion_analytic(phi, 2, kRefPulse, kRefTls).w_f -
                   final_inversion_analytic(phi + kPi, 2, kRefPulse, kRefTls).w_f) <=
          5e-15);

  // Integer transition/carrier ratio locks w_f to -1 for every cep.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
  for (int i = 0; i < 100; ++i)
    CHECK(final_inversion_analytic(dist(rng), 2, kRefPulse, TlsParams{3.0}).w_f ==
          -1.0);
}

TEST_CASE("first-order amplitude ratio") {
  CHECK(std::abs(f_analytic(0.0, kRefPulse, kRefTls).value) == 0.0);
  const GuardedComplex mid = f_analytic(0.5 * kRefPulse.t_end, kRefPulse, kRefTls);
  CHECK(std::isfinite(mid.value.real()));
  CHECK_FALSE(mid.regime_warning);
  CHECK(mid.validity_metric == doctest::Approx(0.366 * 0.366 + 0.181 * 0.181));

  const PulseSpec strong = make_pulse(Shape::Square, 0.5, 0.0, 2.0);
  const GuardedComplex g = f_analytic(4.0, strong, tls_from_detuning_ratio(0.6));
  CHECK(g.regime_warning);
  CHECK(g.validity_metric == doctest::Approx(0.61));
  CHECK(std::isfinite(g.value.real())); // still evaluated, just flagged
}

TEST_CASE("phase-area kernel: truncated vs full") {
  const DerivedParams d = derive_params(kRefPulse, kRefTls);
  const Cplx simp = alpha_simplified(1.0, 4.0, d, kRefTls);
  CHECK(simp.real() == 0.0);
  CHECK(simp.imag() ==
        doctest::Approx(-d.eta * d.eta * kRefTls.transition_freq * 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(alpha_simplified(4.0, 1.0, d, kRefTls), std::invalid_argument);

  // Whole-pulse relative remainder at detuning 0.3 (frozen oracle value),
  // independent of the field strength.
  double ratios[2];
  int k = 0;
  for (double a : {0.05, 0.2}) {
    const PulseSpec p = make_pulse(Shape::Square, a, 0.0, 2.0);
    const TlsParams tls = tls_from_detuning_ratio(0.3);
    const QuadResult full = alpha_full(0.0, p.t_end, p, tls, 1e-13);
    REQUIRE(full.converged);
    const Cplx s = alpha_simplified(0.0, p.t_end, derive_params(p, tls), tls);
    ratios[k++] = std::abs(full.value - s) / std::abs(s);
  }
  CHECK(ratios[0] == doctest::Approx(0.09088).epsilon(1e-3));
  CHECK(ratios[0] == doctest::Approx(ratios[1]).epsilon(1e-9));

  CHECK_THROWS_AS(alpha_full(-1.0, 2.0, kRefPulse, kRefTls), std::domain_error);
}

TEST_CASE("inversion and upper-level probability from f") {
  CHECK(inversion_from_f({0.0, 0.0}) == -1.0);
  CHECK(upper_prob_from_f({0.0, 0.0}) == 0.0);
  CHECK(inversion_from_f({1.0, 0.0}) == 0.0);
  CHECK(upper_prob_from_f({1.0, 0.0}) == 0.5);
  CHECK(upper_prob_from_f({0.0, 3.0}) == doctest::Approx(0.9));
}

TEST_CASE("analytic paths never touch the ODE integrator") {
  const std::uint64_t before = integrate_call_count();
  (void)theta_closed(2.0, kRefPulse, kRefTls);
  (void)f_analytic(2.0, kRefPulse, kRefTls);
  (void)final_inversion_analytic(0.3, 2, kRefPulse, kRefTls);
  (void)q_factor(2, kRefPulse, kRefTls);
  (void)alpha_full(0.0, kRefPulse.t_end, kRefPulse, kRefTls);
  CHECK(integrate_call_count() == before);
}
