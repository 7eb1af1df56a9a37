#include "fewcycle/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fewcycle {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_square(const PulseSpec& p, const char* what) {
  if (p.shape != Shape::Square)
    throw std::invalid_argument(std::string(what) +
                                ": closed form derived for square pulse only");
  if (p.t_start != 0.0)
    throw std::invalid_argument(std::string(what) +
                                ": closed forms assume support starting at t = 0");
}

void require_inside(const PulseSpec& p, double t, const char* what) {
  const double slack = 1e-9 * std::max(1.0, p.t_end);
  if (t < p.t_start - slack || t > p.t_end + slack)
    throw std::domain_error(std::string(what) + ": t outside pulse support");
}

std::complex<double> carrier_phase(double wc, double t) {
  return {std::cos(wc * t), std::sin(wc * t)};
}

} // namespace

std::complex<double> theta_closed(double t, const PulseSpec& p, const TlsParams& tls) {
  require_square(p, "theta_closed");
  require_inside(p, t, "theta_closed");
  const DerivedParams d = derive_params(p, tls);
  const double w = p.carrier_freq;
  const double wc = tls.transition_freq;
  const std::complex<double> inner =
      std::cos(std::complex<double>(w * t + p.cep, d.beta)) * carrier_phase(wc, t) -
      std::cos(std::complex<double>(p.cep, d.beta));
  return -kI * d.eta * inner;
}

ThetaQuad theta_quad_closed(double t, const PulseSpec& p, const TlsParams& tls) {
  ThetaQuad q;
  q.theta = theta_closed(t, p, tls);
  q.theta_conj = std::conj(q.theta);
  q.theta_dot = p.peak_rabi * std::cos(p.carrier_freq * t + p.cep) *
                carrier_phase(tls.transition_freq, t);
  q.theta_dot_conj = std::conj(q.theta_dot);
  return q;
}

std::complex<double> alpha_simplified(double t_prime, double t,
                                      const DerivedParams& d, const TlsParams& tls) {
  if (t < t_prime)
    throw std::invalid_argument("alpha_simplified: requires t_prime <= t");
  return -kI * d.eta * d.eta * tls.transition_freq * (t - t_prime);
}

QuadResult alpha_full(double t_prime, double t, const PulseSpec& p,
                      const TlsParams& tls, double abs_tol) {
  require_square(p, "alpha_full");
  require_inside(p, t_prime, "alpha_full");
  require_inside(p, t, "alpha_full");
  if (t < t_prime) throw std::invalid_argument("alpha_full: requires t_prime <= t");
  const DerivedParams d = derive_params(p, tls);
  const double w = p.carrier_freq;
  const double wc = tls.transition_freq;
  const double phi = p.cep;
  const std::complex<double> edge = std::cos(std::complex<double>(phi, d.beta));
  const double scale = d.eta * p.peak_rabi;
  // Integrand of the phase-area kernel, equal to 2*theta*conj(theta_dot):
  // a constant secular term plus two oscillatory terms that the truncated
  // kernel drops.
  const auto integrand = [&](double u) -> std::complex<double> {
    const std::complex<double> term2 =
        std::cos(std::complex<double>(2.0 * w * u + 2.0 * phi, d.beta));
    const std::complex<double> term3 =
        2.0 * edge * std::cos(w * u + phi) * std::conj(carrier_phase(wc, u));
    return -kI * scale * (std::cosh(d.beta) + term2 - term3);
  };
  return integrate_gk(integrand, t_prime, t, abs_tol);
}

GuardedComplex f_analytic(double t, const PulseSpec& p, const TlsParams& tls) {
  const DerivedParams d = derive_params(p, tls);
  const double phase = d.eta * d.eta * tls.transition_freq * t;
  GuardedComplex g;
  g.value = -0.5 * kI *
            (1.0 + std::complex<double>(std::cos(phase), -std::sin(phase))) *
            theta_closed(t, p, tls);
  g.validity_metric = d.validity_metric;
  g.regime_warning = d.validity_metric >= kValidityGuideline;
  return g;
}

long require_integer_cycles(const PulseSpec& p) {
  const long n = std::lround(p.cycles);
  if (n < 1 || std::abs(p.cycles - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument(
        "final-state closed forms need an integer number of carrier cycles");
  return n;
}

double theta_f_sq(const PulseSpec& p, const TlsParams& tls) {
  require_square(p, "theta_f_sq");
  const long n = require_integer_cycles(p);
  const DerivedParams d = derive_params(p, tls);
  const double ratio = tls.transition_freq / p.carrier_freq;
  const double c = std::cos(p.cep);
  return 2.0 * d.eta * d.eta * c * c *
         (1.0 - std::cos(2.0 * static_cast<double>(n) * ratio * std::numbers::pi));
}

double theta_sq_exact(double t, const PulseSpec& p, const TlsParams& tls) {
  require_square(p, "theta_sq_exact");
  require_inside(p, t, "theta_sq_exact");
  const DerivedParams d = derive_params(p, tls);
  const double w = p.carrier_freq;
  const double wc = tls.transition_freq;
  const double phi = p.cep;
  const double c2b = std::cosh(2.0 * d.beta);
  const double s2b = std::sinh(2.0 * d.beta);
  return d.eta * d.eta *
         (c2b * (1.0 - std::cos(w * t) * std::cos(wc * t)) +
          std::cos(w * t + 2.0 * phi) * (std::cos(w * t) - std::cos(wc * t)) -
          s2b * std::sin(w * t) * std::sin(wc * t));
}

double theta_f_sq_exact(const PulseSpec& p, const TlsParams& tls) {
  require_square(p, "theta_f_sq_exact");
  const long n = require_integer_cycles(p);
  const DerivedParams d = derive_params(p, tls);
  const double ratio = tls.transition_freq / p.carrier_freq;
  const double angle = 2.0 * static_cast<double>(n) * ratio * std::numbers::pi;
  return d.eta * d.eta * (1.0 - std::cos(angle)) *
         (std::cosh(2.0 * d.beta) + std::cos(2.0 * p.cep));
}

double q_factor(long n_cycles, const PulseSpec& p, const TlsParams& tls) {
  if (n_cycles < 1) throw std::invalid_argument("q_factor: cycles must be >= 1");
  const DerivedParams d = derive_params(p, tls);
  const double ratio = tls.transition_freq / p.carrier_freq;
  const double n = static_cast<double>(n_cycles);
  const double first = 1.0 + std::cos(2.0 * n * d.eta * d.eta * ratio * std::numbers::pi);
  const double second = 1.0 - std::cos(2.0 * n * ratio * std::numbers::pi);
  return first * second;
}

FinalInversionResult final_inversion_analytic(double phi, long n_cycles,
                                              const PulseSpec& pulse,
                                              const TlsParams& tls) {
  require_square(pulse, "final_inversion_analytic");
  PulseSpec p = pulse;
  p.cep = phi;
  p.cycles = static_cast<double>(n_cycles);
  p.t_end = p.cycles * p.period();
  validate(p);

  const DerivedParams d = derive_params(p, tls);
  FinalInversionResult r;
  r.q = q_factor(n_cycles, p, tls);
  r.theta_f_sq = theta_f_sq(p, tls);
  r.theta_f_sq_exact = theta_f_sq_exact(p, tls);
  const double c = std::cos(phi);
  const double x = r.q * d.eta * d.eta * c * c;
  r.w_f = (x - 1.0) / (x + 1.0);
  r.delta_w = x / (x + 1.0);
  r.w_f_linear = -1.0 + 2.0 * x;

  const double ratio = tls.transition_freq / p.carrier_freq;
  const double first =
      1.0 + std::cos(2.0 * static_cast<double>(n_cycles) * d.eta * d.eta * ratio *
                     std::numbers::pi);
  const double xe = 0.5 * first * r.theta_f_sq_exact;
  r.w_f_exact_theta = (xe - 1.0) / (xe + 1.0);

  r.validity_metric = d.validity_metric;
  r.regime_warning = d.validity_metric >= kValidityGuideline;
  return r;
}

double inversion_from_f(std::complex<double> f) {
  const double m = std::norm(f);
  return (m - 1.0) / (m + 1.0);
}

double upper_prob_from_f(std::complex<double> f) {
  const double m = std::norm(f);
  return m / (1.0 + m);
}

} // namespace fewcycle
