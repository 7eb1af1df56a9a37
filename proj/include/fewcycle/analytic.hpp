#pragma once

#include <complex>

#include "fewcycle/pulse.hpp"
#include "fewcycle/quadrature.hpp"

namespace fewcycle {

// Closed forms for the square drive in the below-resonance branch
// (carrier < transition).  All take the pulse's own cep unless noted.

struct ThetaQuad {
  std::complex<double> theta;
  std::complex<double> theta_conj;
  std::complex<double> theta_dot;
  std::complex<double> theta_dot_conj;
};

// Phase integral of the drive, evaluated in closed form:
//   theta(t) = -i*eta*[cos(w*t + phi + i*beta)*e^{i*wc*t} - cos(phi + i*beta)]
// Requires a square pulse and t within [0, tau]; throws otherwise.
std::complex<double> theta_closed(double t, const PulseSpec& pulse,
                                  const TlsParams& tls);

// theta, its conjugate, and the time derivative pair.
ThetaQuad theta_quad_closed(double t, const PulseSpec& pulse, const TlsParams& tls);

// Two-term-truncated phase-area kernel: -i*eta^2*wc*(t - t_prime).
// Throws if t < t_prime.
std::complex<double> alpha_simplified(double t_prime, double t,
                                      const DerivedParams& d, const TlsParams& tls);

// Untruncated kernel, by adaptive quadrature of the three-term integrand.
// Non-convergence is reported through the result's flag and error estimate.
QuadResult alpha_full(double t_prime, double t, const PulseSpec& pulse,
                      const TlsParams& tls, double abs_tol = 1e-12);

// Value plus a soft regime flag (validity_metric >= 0.5 means the
// perturbative solution is outside its trust region; value still returned).
struct GuardedComplex {
  std::complex<double> value{0.0, 0.0};
  bool regime_warning = false;
  double validity_metric = 0.0;
};

// First-order amplitude ratio: f(t) = -(i/2)*(1 + e^{-i*eta^2*wc*t})*theta(t).
GuardedComplex f_analytic(double t, const PulseSpec& pulse, const TlsParams& tls);

// Rounds cycles to the nearest integer; throws std::invalid_argument when
// cycles is not an integer >= 1 within 1e-9.  Final-state closed forms
// assume a whole number of carrier cycles.
long require_integer_cycles(const PulseSpec& pulse);

// End-of-pulse |theta|^2 in the flattened (cosh 2beta -> 1) form:
//   2*eta^2*cos^2(phi)*(1 - cos(2*N*(wc/w)*pi))
double theta_f_sq(const PulseSpec& pulse, const TlsParams& tls);

// Exact |theta(t)|^2 (no flattening); valid at any t in the pulse.
double theta_sq_exact(double t, const PulseSpec& pulse, const TlsParams& tls);

// Exact end-of-pulse value: eta^2*(1 - cos(wc*tau))*(cosh(2beta) + cos(2phi)).
double theta_f_sq_exact(const PulseSpec& pulse, const TlsParams& tls);

// Interference factor Q = (1 + cos(2N*eta^2*(wc/w)*pi))*(1 - cos(2N*(wc/w)*pi)),
// bounded in [0, 4].  Uses the pulse's field strength, not its cep.
double q_factor(long n_cycles, const PulseSpec& pulse, const TlsParams& tls);

struct FinalInversionResult {
  double w_f = -1.0;     // (X - 1)/(X + 1), X = Q*eta^2*cos^2(phi)
  double delta_w = 0.0;  // (w_f + 1)/2
  double q = 0.0;
  double theta_f_sq = 0.0;
  double w_f_linear = -1.0;      // -1 + 2*Q*eta^2*cos^2(phi)
  double theta_f_sq_exact = 0.0; // diagnostic: no cosh(2beta) flattening
  double w_f_exact_theta = -1.0; // w_f rebuilt from the exact |theta_f|^2
  bool regime_warning = false;
  double validity_metric = 0.0;
};

// CEP law for the final inversion.  phi overrides the pulse's cep field.
FinalInversionResult final_inversion_analytic(double phi, long n_cycles,
                                              const PulseSpec& pulse,
                                              const TlsParams& tls);

// w = (|f|^2 - 1)/(|f|^2 + 1) and |C|^2 = |f|^2/(1 + |f|^2).
double inversion_from_f(std::complex<double> f);
double upper_prob_from_f(std::complex<double> f);

} // namespace fewcycle
