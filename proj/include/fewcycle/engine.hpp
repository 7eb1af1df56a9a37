#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fewcycle/pulse.hpp"
#include "fewcycle/quadrature.hpp"

namespace fewcycle {

enum class StepMode { FixedStep, Adaptive };

struct IntegratorConfig {
  int steps_per_cycle = 2000; // FixedStep; must be >= 100
  double rel_tol = 1e-10;     // Adaptive
  double abs_tol = 1e-12;     // Adaptive
  StepMode mode = StepMode::FixedStep;
  int norm_check_interval = 16; // steps between norm audits
};

void validate(const IntegratorConfig& cfg); // throws std::invalid_argument

// Integration rejected: |C|^2 + |D|^2 drifted beyond 1e-6 from 1.
struct NormDriftError : std::runtime_error {
  double deviation, at_time;
  NormDriftError(double dev, double t);
};

// Adaptive step fell below 1e-15 of a carrier cycle.
struct StepUnderflowError : std::runtime_error {
  double at_time;
  explicit StepUnderflowError(double t);
};

// |D| fell below the f = C/D guard threshold where f was required.
struct DivisionGuardError : std::runtime_error {
  double at_time;
  explicit DivisionGuardError(double t);
};

inline constexpr double kNormRejectTol = 1e-6;
inline constexpr double kDivisionGuard = 1e-6;

struct Trajectory {
  std::vector<double> times;
  std::vector<std::complex<double>> c_amp;
  std::vector<std::complex<double>> d_amp;
  std::vector<std::complex<double>> f_ratio; // valid where f_valid
  std::vector<char> f_valid;                 // |D| > guard threshold
  std::vector<double> norm;                  // |C|^2 + |D|^2
  std::vector<double> c_prob;                // |C|^2
  std::vector<double> w;                     // 2|C|^2 - 1
  double max_norm_deviation = 0.0;
  std::size_t size() const { return times.size(); }
};

// Integrates dC/dt = -i*field(t)*e^{+i*wc*t} D, dD/dt = -i*field(t)*e^{-i*wc*t} C
// over the pulse support from the ground state (C=0, D=1).  Fixed-step mode
// restarts at every envelope segment boundary so no step straddles a
// discontinuity, and evaluates the segment-local envelope so stage times a
// few ulp past a boundary stay on the correct branch.
Trajectory integrate_tls(const PulseSpec& pulse, const TlsParams& tls,
                         const IntegratorConfig& cfg = {});

// Same solver over an arbitrary window [t0, t1] (t1 < t0 integrates
// backward) from a caller-supplied state.  Times outside the pulse support
// see zero field.
Trajectory integrate_tls_window(const PulseSpec& pulse, const TlsParams& tls,
                                const IntegratorConfig& cfg, double t0, double t1,
                                std::complex<double> c0, std::complex<double> d0);

// Number of integrate_tls_window invocations since process start (includes
// integrate_tls).  Lets tests prove that analytic-only paths never touch
// the integrator.
std::uint64_t integrate_call_count();

// Adaptive quadrature of the drive phase integral
//   theta(t) = integral_0^t field(u) e^{+i*wc*u} du
// for any pulse shape; domain split at envelope segment boundaries.
// t at or before the support start gives exactly 0.
QuadResult theta_quadrature(double t, const PulseSpec& pulse, const TlsParams& tls,
                            double abs_tol = 1e-12);

// Pointwise defect of the trajectory's f = C/D against the scalar evolution
//   df/dt = i*field*e^{-i*wc*t} f^2 - i*field*e^{+i*wc*t},
// with df/dt from central differences.  Entries at window ends and at
// unevenly spaced nodes are NaN.  Throws DivisionGuardError if f was
// undefined anywhere in the window.
std::vector<double> riccati_residual(const Trajectory& traj, const PulseSpec& pulse,
                                     const TlsParams& tls);

// Same defect for an externally supplied f(t) sampled on `times`.
std::vector<double> riccati_residual(const std::vector<double>& times,
                                     const std::vector<std::complex<double>>& f,
                                     const PulseSpec& pulse, const TlsParams& tls);

struct FinalState {
  double c_prob = 0.0;
  double w = -1.0;
  std::complex<double> f{0.0, 0.0};
};

// Observables at the last trajectory sample (pulse end).
FinalState final_state(const Trajectory& traj);

} // namespace fewcycle
