#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace fewcycle {

// Internal unit system: the carrier angular frequency is 1, so one optical
// cycle lasts 2*pi.  Callers parameterize runs by the two dimensionless
// ratios used throughout: a = peak_rabi/carrier and r = carrier/transition.

enum class Shape { Square, TopHat, Gaussian };

const char* shape_name(Shape s);
Shape shape_from_name(const std::string& name); // throws std::invalid_argument

// Drive pulse: field(t) = peak_rabi * envelope(t) * cos(carrier_freq*t + cep).
// Support [t_start, t_end] is derived from shape and cycle count; the field
// is exactly zero outside it.
struct PulseSpec {
  Shape shape = Shape::Square;
  double carrier_freq = 1.0; // omega
  double cep = 0.0;          // phi, radians
  double peak_rabi = 0.0;    // Omega_0, same units as omega
  double cycles = 0.0;       // N, positive real
  double t_start = 0.0;
  double t_end = 0.0;

  double period() const;
  double duration() const { return t_end - t_start; }
  std::pair<double, double> support() const { return {t_start, t_end}; }
};

// Builds a spec with the support interval filled in and invariants checked.
// Square/TopHat: support [0, N*T].  Gaussian: field-envelope FWHM = N*T,
// peak at 4*FWHM, support [0, 8*FWHM] (envelope = 2^-64 < 1e-19 at the cut).
PulseSpec make_pulse(Shape shape, double peak_rabi, double cep, double cycles,
                     double carrier_freq = 1.0);

// Throws std::invalid_argument if fields or support are inconsistent.
void validate(const PulseSpec& pulse);

struct TlsParams {
  double transition_freq = 0.0; // omega_c, must exceed carrier_freq
};

// Convenience for the standard parameterization (carrier = 1).
TlsParams tls_from_detuning_ratio(double r); // r = carrier/transition in (0,1)

struct DerivedParams {
  double eta = 0.0;             // peak_rabi / sqrt(omega_c^2 - omega^2)
  double beta = 0.0;            // cosh(beta) = omega_c / sqrt(omega_c^2 - omega^2)
  double validity_metric = 0.0; // (omega/omega_c)^2 + (peak_rabi/omega)^2
};

// Small-parameter threshold: above this the closed forms are unreliable.
inline constexpr double kValidityGuideline = 0.5;

// Throws std::invalid_argument unless 0 < omega < omega_c.
DerivedParams derive_params(const PulseSpec& pulse, const TlsParams& tls);

// Normalized envelope in [0, 1]; exactly 0 outside the support.
double envelope(const PulseSpec& pulse, double t);

// peak_rabi * envelope(t) * cos(carrier_freq*t + cep)
double field(const PulseSpec& pulse, double t);

// Times at which the field or one of its derivatives is discontinuous,
// including both support endpoints.  Square: {0, tau}.  TopHat adds the
// ramp joins.  Gaussian: just the truncation endpoints.
std::vector<double> segment_boundaries(const PulseSpec& pulse);

// Envelope of segment `seg` (between boundaries seg and seg+1) evaluated
// WITHOUT support or branch checks: each segment's analytic piece extended
// to all t.  Integrators must use this so that stage times that land a few
// ulp outside the segment still see the correct smooth branch.
double segment_envelope(const PulseSpec& pulse, std::size_t seg, double t);

double segment_field(const PulseSpec& pulse, std::size_t seg, double t);

// Physical-unit conversion for an 800 nm (default) carrier.
struct PhysicalScale {
  double carrier_rad_per_s = 0.0; // 2*pi*c / wavelength
  double seconds_per_unit = 0.0;  // internal time unit in seconds
};
PhysicalScale physical_scale(double wavelength_nm = 800.0);

} // namespace fewcycle
