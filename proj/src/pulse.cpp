#include "fewcycle/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fewcycle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gaussian_fwhm(const PulseSpec& p) { return p.cycles * p.period(); }

// exp(-4 ln2 ((t - c)/F)^2): field-envelope full width at half maximum F.
double gaussian_env(double t, double center, double fwhm) {
  const double u = (t - center) / fwhm;
  return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

// sin^2(pi t / (2w)) rises 0 -> 1 over [0, w] with zero slope at both ends.
double ramp_up(double t, double w) {
  const double s = std::sin(0.5 * std::numbers::pi * t / w);
  return s * s;
}

} // namespace

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Square: return "square";
    case Shape::TopHat: return "tophat";
    case Shape::Gaussian: return "gaussian";
  }
  return "?";
}

Shape shape_from_name(const std::string& name) {
  if (name == "square") return Shape::Square;
  if (name == "tophat" || name == "top-hat") return Shape::TopHat;
  if (name == "gaussian") return Shape::Gaussian;
  throw std::invalid_argument("unknown pulse shape: " + name);
}

double PulseSpec::period() const { return kTwoPi / carrier_freq; }

PulseSpec make_pulse(Shape shape, double peak_rabi, double cep, double cycles,
                     double carrier_freq) {
  PulseSpec p;
  p.shape = shape;
  p.carrier_freq = carrier_freq;
  p.cep = cep;
  p.peak_rabi = peak_rabi;
  p.cycles = cycles;
  p.t_start = 0.0;
  p.t_end = (shape == Shape::Gaussian) ? 8.0 * cycles * (kTwoPi / carrier_freq)
                                       : cycles * (kTwoPi / carrier_freq);
  validate(p);
  return p;
}

void validate(const PulseSpec& p) {
  if (!(p.carrier_freq > 0.0)) throw std::invalid_argument("carrier_freq must be > 0");
  if (!(p.peak_rabi >= 0.0)) throw std::invalid_argument("peak_rabi must be >= 0");
  if (!(p.cycles > 0.0)) throw std::invalid_argument("cycles must be > 0");
  if (!std::isfinite(p.cep)) throw std::invalid_argument("cep must be finite");
  if (p.shape == Shape::TopHat && p.cycles < 1.0)
    throw std::invalid_argument("tophat needs cycles >= 1 (two half-period ramps)");
  const double want_len = (p.shape == Shape::Gaussian)
                              ? 8.0 * p.cycles * p.period()
                              : p.cycles * p.period();
  if (!std::isfinite(p.t_start) || std::abs(p.duration() - want_len) > 1e-12 * want_len)
    throw std::invalid_argument("support inconsistent with shape and cycles");
}

TlsParams tls_from_detuning_ratio(double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("detuning ratio must lie in (0, 1)");
  return TlsParams{1.0 / r};
}

DerivedParams derive_params(const PulseSpec& pulse, const TlsParams& tls) {
  const double w = pulse.carrier_freq;
  const double wc = tls.transition_freq;
  if (!(wc > w))
    throw std::invalid_argument("transition frequency must exceed carrier frequency");
  const double root = std::sqrt(wc * wc - w * w);
  DerivedParams d;
  d.eta = pulse.peak_rabi / root;
  d.beta = std::acosh(wc / root);
  const double r = w / wc;
  const double a = pulse.peak_rabi / w;
  d.validity_metric = r * r + a * a;
  return d;
}

double envelope(const PulseSpec& p, double t) {
  if (t < p.t_start || t > p.t_end) return 0.0;
  switch (p.shape) {
    case Shape::Square:
      return 1.0;
    case Shape::TopHat: {
      const double ramp = 0.5 * p.period();
      if (t < p.t_start + ramp) return ramp_up(t - p.t_start, ramp);
      if (t > p.t_end - ramp) return ramp_up(p.t_end - t, ramp);
      return 1.0;
    }
    case Shape::Gaussian: {
      const double fwhm = gaussian_fwhm(p);
      return gaussian_env(t, p.t_start + 4.0 * fwhm, fwhm);
    }
  }
  return 0.0;
}

double field(const PulseSpec& p, double t) {
  return p.peak_rabi * envelope(p, t) * std::cos(p.carrier_freq * t + p.cep);
}

std::vector<double> segment_boundaries(const PulseSpec& p) {
  switch (p.shape) {
    case Shape::Square:
      return {p.t_start, p.t_end};
    case Shape::TopHat: {
      const double ramp = 0.5 * p.period();
      return {p.t_start, p.t_start + ramp, p.t_end - ramp, p.t_end};
    }
    case Shape::Gaussian:
      return {p.t_start, p.t_end};
  }
  return {};
}

double segment_envelope(const PulseSpec& p, std::size_t seg, double t) {
  switch (p.shape) {
    case Shape::Square:
      return 1.0;
    case Shape::TopHat: {
      const double ramp = 0.5 * p.period();
      if (seg == 0) return ramp_up(t - p.t_start, ramp);
      if (seg == 1) return 1.0;
      return ramp_up(p.t_end - t, ramp);
    }
    case Shape::Gaussian: {
      const double fwhm = gaussian_fwhm(p);
      return gaussian_env(t, p.t_start + 4.0 * fwhm, fwhm);
    }
  }
  return 0.0;
}

double segment_field(const PulseSpec& p, std::size_t seg, double t) {
  return p.peak_rabi * segment_envelope(p, seg, t) *
         std::cos(p.carrier_freq * t + p.cep);
}

PhysicalScale physical_scale(double wavelength_nm) {
  if (!(wavelength_nm > 0.0))
    throw std::invalid_argument("wavelength must be > 0");
  constexpr double c_m_per_s = 299'792'458.0;
  PhysicalScale s;
  s.carrier_rad_per_s = kTwoPi * c_m_per_s / (wavelength_nm * 1e-9);
  s.seconds_per_unit = 1.0 / s.carrier_rad_per_s;
  return s;
}

} // namespace fewcycle
