#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "recollide/core.hpp"

namespace recollide::numeric {

// Safeguarded Newton on a bracket [lo, hi] with f(lo), f(hi) of opposite sign (or zero).
// fdf(x, &df) returns f(x) and stores f'(x).
template <class F>
double newton_bisect(F&& fdf, double lo, double hi, double tol, int max_iter = 100) {
  double dlo, dhi;
  double flo = fdf(lo, &dlo);
  double fhi = fdf(hi, &dhi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw Error(ErrorCode::InvalidArgument, "root is not bracketed");
  if (flo > 0.0) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  // Now f(lo) < 0 < f(hi); lo may exceed hi.
  double x = lo - flo * (hi - lo) / (fhi - flo);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  double df;
  double fx = fdf(x, &df);
  for (int it = 0; it < max_iter; ++it) {
    const bool newton_ok = df != 0.0 && ((x - hi) * df - fx) * ((x - lo) * df - fx) < 0.0 &&
                           std::abs(2.0 * fx) < std::abs(dx_old * df);
    dx_old = dx;
    if (newton_ok) {
      dx = fx / df;
      x -= dx;
    } else {
      dx = 0.5 * (hi - lo);
      x = lo + dx;
    }
    if (std::abs(dx) < tol) return x;
    fx = fdf(x, &df);
    if (fx == 0.0) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
  }
  return x;
}

// Golden-section search for a maximum of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace recollide::numeric
