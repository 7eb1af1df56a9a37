#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "fewcycle/quadrature.hpp"

using namespace fewcycle;

namespace {
constexpr double kPi = std::numbers::pi;
using Cplx = std::complex<double>;
}

TEST_CASE("polynomials are integrated exactly on one panel") {
  const auto f = [](double x) { return Cplx{3.0 * x * x, 2.0 * x}; };
  const QuadResult r = integrate_gk(f, 0.0, 1.0);
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.value.imag() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.converged);
  CHECK(r.subdivisions == 0);
}

TEST_CASE("whole-period complex exponentials integrate to zero") {
  const auto f = [](double t) { return Cplx{std::cos(7.0 * t), std::sin(7.0 * t)}; };
  const QuadResult r = integrate_gk(f, 0.0, 2.0 * kPi, 1e-13);
  CHECK(std::abs(r.value) < 1e-12);
  CHECK(r.converged);
}

TEST_CASE("drive-like product has the known mean") {
  // integral_0^{2pi} cos(t) e^{i t} dt = pi
  const auto f = [](double t) {
    return std::cos(t) * Cplx{std::cos(t), std::sin(t)};
  };
  const QuadResult r = integrate_gk(f, 0.0, 2.0 * kPi, 1e-13);
  CHECK(r.value.real() == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(std::abs(r.value.imag()) < 1e-13);
}

TEST_CASE("reversed bounds negate the result; empty interval is zero") {
  const auto f = [](double x) { return Cplx{x * x, std::exp(x)}; };
  const QuadResult fwd = integrate_gk(f, 0.0, 1.0);
  const QuadResult rev = integrate_gk(f, 1.0, 0.0);
  CHECK(rev.value.real() == -fwd.value.real());
  CHECK(rev.value.imag() == -fwd.value.imag());

  const QuadResult empty = integrate_gk(f, 0.5, 0.5);
  CHECK(empty.value == Cplx{0.0, 0.0});
  CHECK(empty.converged);
}

TEST_CASE("breakpoints let a kink integrate on the first panel pair") {
  const auto f = [](double x) { return Cplx{std::abs(x), 0.0}; };
  const QuadResult split = integrate_gk_segmented(f, -1.0, 1.0, {0.0}, 1e-13);
  CHECK(split.value.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(split.converged);
  CHECK(split.subdivisions == 0);
  // Breakpoints outside (a, b) are ignored.
  const QuadResult same = integrate_gk_segmented(f, -1.0, 1.0, {-5.0, 0.0, 7.0}, 1e-13);
  CHECK(same.value.real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("starved subdivision budget reports non-convergence") {
  const auto f = [](double x) { return Cplx{std::cos(1e6 * x), 0.0}; };
  const QuadResult r = integrate_gk(f, 0.0, 1.0, 1e-13, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.error_estimate > 1e-13);
  CHECK(r.subdivisions == 3);
}

TEST_CASE("identical inputs give bitwise-identical results") {
  const auto f = [](double t) {
    return std::cos(3.1 * t) * Cplx{std::cos(5.7 * t), std::sin(5.7 * t)};
  };
  const QuadResult a = integrate_gk(f, 0.0, 13.2, 1e-12);
  const QuadResult b = integrate_gk(f, 0.0, 13.2, 1e-12);
  CHECK(a.value.real() == b.value.real());
  CHECK(a.value.imag() == b.value.imag());
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(a.subdivisions == b.subdivisions);
}
