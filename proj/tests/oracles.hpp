#pragma once

// Test-only numerical oracles, independent of the library's quadrature paths.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0) return left + right;
  if (std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson on a finite interval.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return detail::adapt(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb),
                       tol, depth);
}

// Integral over [a, inf) of an eventually-decaying integrand: doubling
// panels until the increment is negligible.
inline double integrate_to_inf(const std::function<double(double)>& f,
                               double a, double tol = 1e-12) {
  double total = 0.0;
  double left = a;
  double width = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double piece = integrate(f, left, left + width, tol * 0.1);
    total += piece;
    left += width;
    width *= 2.0;
    if (std::fabs(piece) < tol * (1.0 + std::fabs(total)) && k > 3) break;
  }
  return total;
}

} // namespace oracle
