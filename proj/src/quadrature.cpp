#include "fewcycle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fewcycle {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  std::complex<double> value;
  double err_re, err_im;
  double worst() const { return std::max(err_re, err_im); }
};

Interval eval_gk15(const ComplexIntegrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> kron = kWgk[7] * fc;
  std::complex<double> gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const std::complex<double> pair = f(c - x) + f(c + x);
    kron += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[(j - 1) / 2] * pair;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron.real() - gauss.real()),
          std::abs(kron.imag() - gauss.imag())};
}

struct WorstFirst {
  bool operator()(const Interval& lhs, const Interval& rhs) const {
    if (lhs.worst() != rhs.worst()) return lhs.worst() < rhs.worst();
    return lhs.a > rhs.a; // deterministic tie-break
  }
};

} // namespace

QuadResult integrate_gk(const ComplexIntegrand& f, double a, double b,
                        double abs_tol, int max_subdiv) {
  if (a == b) return {};
  if (b < a) {
    QuadResult r = integrate_gk(f, b, a, abs_tol, max_subdiv);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Interval, std::vector<Interval>, WorstFirst> active;
  std::vector<Interval> frozen; // too narrow to split further
  active.push(eval_gk15(f, a, b));
  double err_re = active.top().err_re;
  double err_im = active.top().err_im;
  int splits = 0;

  const double min_width = 16.0 * (std::abs(a) + std::abs(b) + 1.0) * 1e-16;
  while ((err_re > abs_tol || err_im > abs_tol) && splits < max_subdiv &&
         !active.empty()) {
    Interval worst = active.top();
    active.pop();
    if (worst.b - worst.a < min_width) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Interval left = eval_gk15(f, worst.a, mid);
    Interval right = eval_gk15(f, mid, worst.b);
    err_re += left.err_re + right.err_re - worst.err_re;
    err_im += left.err_im + right.err_im - worst.err_im;
    active.push(left);
    active.push(right);
    ++splits;
  }

  while (!active.empty()) {
    frozen.push_back(active.top());
    active.pop();
  }
  std::sort(frozen.begin(), frozen.end(),
            [](const Interval& lhs, const Interval& rhs) { return lhs.a < rhs.a; });
  QuadResult out;
  double sum_re = 0.0, sum_im = 0.0;
  for (const Interval& iv : frozen) {
    out.value += iv.value;
    sum_re += iv.err_re;
    sum_im += iv.err_im;
  }
  out.error_estimate = std::max(sum_re, sum_im);
  out.converged = sum_re <= abs_tol && sum_im <= abs_tol;
  out.subdivisions = splits;
  return out;
}

QuadResult integrate_gk_segmented(const ComplexIntegrand& f, double a, double b,
                                  const std::vector<double>& breakpoints,
                                  double abs_tol, int max_subdiv) {
  if (a == b) return {};
  if (b < a) {
    QuadResult r = integrate_gk_segmented(f, b, a, breakpoints, abs_tol, max_subdiv);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  const double per_piece = abs_tol / static_cast<double>(cuts.size() - 1);
  QuadResult out;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadResult piece = integrate_gk(f, cuts[i], cuts[i + 1], per_piece, max_subdiv);
    out.value += piece.value;
    err += piece.error_estimate;
    out.converged = out.converged && piece.converged;
    out.subdivisions += piece.subdivisions;
  }
  out.error_estimate = err;
  return out;
}

} // namespace fewcycle
