#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace fewcycle {

struct QuadResult {
  std::complex<double> value{0.0, 0.0};
  double error_estimate = 0.0; // worst of the real/imag accumulated estimates
  bool converged = true;
  int subdivisions = 0;
};

using ComplexIntegrand = std::function<std::complex<double>(double)>;

// Globally adaptive Gauss-Kronrod 7/15 on [a, b] (a > b allowed: the result
// is negated).  Bisects the interval with the largest componentwise |K - G|
// until the accumulated estimate drops below abs_tol or max_subdiv splits
// have been spent.  Deterministic for identical inputs.
QuadResult integrate_gk(const ComplexIntegrand& f, double a, double b,
                        double abs_tol = 1e-13, int max_subdiv = 4000);

// Same, but with the domain pre-split at interior breakpoints (integrand
// kinks/discontinuities); breakpoints outside (a, b) are ignored.
QuadResult integrate_gk_segmented(const ComplexIntegrand& f, double a, double b,
                                  const std::vector<double>& breakpoints,
                                  double abs_tol = 1e-13, int max_subdiv = 4000);

} // namespace fewcycle
