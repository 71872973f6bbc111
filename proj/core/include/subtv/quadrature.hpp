#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace subtv {

/// Tanh-sinh (double-exponential) quadrature on [a, b]. Handles integrable
/// endpoint singularities; nodes never touch the endpoints. Underflowed nodes
/// are skipped, which truncates only contributions below ~1e-300.
template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13, int max_level = 9) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  if (half == 0.0) return 0.0;
  const double t_max = 6.1;

  const auto node_sum = [&](double t) {
    const double s = M_PI_2 * std::sinh(t);
    const double ch = std::cosh(s);
    const double w = (M_PI_2 * std::cosh(t)) / (ch * ch);
    // offset from the endpoints: 1 - tanh(s) = 2 / (1 + e^{2s})
    const double delta = 2.0 / (1.0 + std::exp(2.0 * s));
    const double off = half * delta;
    if (w == 0.0 || off == 0.0) return 0.0;  // node collapsed onto an endpoint
    return w * (f(a + off) + f(b - off));
  };

  double h = 1.0;
  double sum = M_PI_2 * f(mid);  // t = 0 node, weight pi/2
  for (double t = h; t <= t_max; t += h) {
    sum += node_sum(t);
  }
  double integral = sum * h * half;

  int quiet = 0;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double extra = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) {
      extra += node_sum(t);
    }
    sum += extra;
    const double refined = sum * h * half;
    const double change = std::abs(refined - integral);
    integral = refined;
    if (change <= rel_tol * std::abs(integral) + 1e-300) {
      if (level >= 4 && ++quiet >= 2) break;  // two consecutive quiet levels
    } else {
      quiet = 0;
    }
  }
  return integral;
}

/// Adaptive Simpson quadrature for smooth integrands.
namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace subtv
