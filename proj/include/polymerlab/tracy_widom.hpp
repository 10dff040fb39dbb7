#pragma once

// GUE Tracy-Widom distribution F_2(t) = det(I - K_Ai)_{L^2(t, inf)} with the
// Airy kernel
//
//   K_Ai(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y),
//   K_Ai(x, x) = Ai'(x)^2 - x Ai(x)^2,
//
// evaluated by Gauss-Legendre Nystrom discretization on a truncated
// interval, following Bornemann, Math. Comp. 79 (2010),
// https://doi.org/10.1090/S0025-5718-09-02280-7. The kernel decays like
// exp(-4/3 (x^{3/2} + y^{3/2})), so [t, t+18] truncation is far below
// double round-off for every t of interest here.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polymerlab/contour.hpp"
#include "polymerlab/specfun.hpp"

namespace polymerlab {

namespace detail {

template <typename T>
T lu_det(std::vector<T>& a, int n) {
  T det = T(1);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(a[size_t(c) * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double mag = std::abs(a[size_t(r) * n + c]);
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (best == 0.0) return T(0);
    if (piv != c) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[size_t(c) * n + k], a[size_t(piv) * n + k]);
      }
      det = -det;
    }
    det *= a[size_t(c) * n + c];
    for (int r = c + 1; r < n; ++r) {
      const T f = a[size_t(r) * n + c] / a[size_t(c) * n + c];
      if (f == T(0)) continue;
      for (int k = c + 1; k < n; ++k) {
        a[size_t(r) * n + k] -= f * a[size_t(c) * n + k];
      }
    }
  }
  return det;
}

}  // namespace detail

// det(I - K_Ai) on [t, infinity), truncated where the kernel is below
// round-off. Accuracy is limited by the Airy evaluations (~1e-13) long
// before the quadrature order m matters.
inline double tracy_widom_airy_det(double t, int m = 120) {
  const double b = std::min(t + 18.0, 15.0);
  if (!(b > t)) return 1.0;  // interval empty: no spectrum left of it
  const auto& [gx, gw] = gauss_legendre(m);
  std::vector<double> x(m), w(m), ai(m), aip(m);
  for (int k = 0; k < m; ++k) {
    x[k] = 0.5 * (t + b) + 0.5 * (b - t) * gx[k];
    w[k] = 0.5 * (b - t) * gw[k];
    ai[k] = airy_ai(x[k]);
    aip[k] = airy_ai_prime(x[k]);
  }
  std::vector<double> a(size_t(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double kij =
          (i == j) ? aip[i] * aip[i] - x[i] * ai[i] * ai[i]
                   : (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
      a[size_t(i) * m + j] = (i == j ? 1.0 : 0.0) - w[j] * kij;
    }
  }
  return detail::lu_det(a, m);
}

namespace detail {

struct TracyWidomTable {
  double lo = -6.0, hi = 4.0, step = 0.02;
  std::vector<double> f;
  TracyWidomTable() {
    const int n = int(std::lround((hi - lo) / step)) + 1;
    f.resize(n);
    for (int k = 0; k < n; ++k) f[k] = tracy_widom_airy_det(lo + k * step, 100);
  }
};

inline const TracyWidomTable& tracy_widom_table() {
  static const TracyWidomTable table;  // ~1s, built on first use
  return table;
}

}  // namespace detail

// F_2 CDF for arbitrary real argument: linear interpolation on a cached
// [-6, 4] grid (error ~2e-5), direct Nystrom evaluation outside it, hard
// 0/1 clamps where the tails are below double resolution.
inline double tracy_widom_cdf(double x) {
  if (!(x == x)) throw std::domain_error("tracy_widom_cdf: NaN argument");
  if (x <= -14.0) return 0.0;
  if (x >= 14.0) return 1.0;
  const auto& tab = detail::tracy_widom_table();
  if (x < tab.lo || x > tab.hi) return tracy_widom_airy_det(x, 100);
  const double u = (x - tab.lo) / tab.step;
  const int k = std::min(int(u), int(tab.f.size()) - 2);
  const double frac = u - k;
  return (1.0 - frac) * tab.f[k] + frac * tab.f[size_t(k) + 1];
}

}  // namespace polymerlab
