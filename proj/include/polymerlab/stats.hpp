#pragma once

// Kolmogorov-Smirnov machinery for the Tracy-Widom convergence and
// perturbation experiments: exact empirical-CDF sup distances plus the
// asymptotic Kolmogorov distribution for p-values and critical levels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymerlab {

// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
// exp(-2 k^2 lambda^2). The alternating series converges for every
// lambda > 0 (terms decay once k ~ 1/lambda); no closed form needed.
// https://en.wikipedia.org/wiki/Kolmogorov%E2%80%93Smirnov_test
inline double kolmogorov_q(double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::domain_error("kolmogorov_q: lambda must be >= 0");
  }
  if (lambda == 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    const double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-17 && k > 1.0 / lambda) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// sup_x |F_n(x) - F(x)| for sorted samples against a reference CDF. The
// sup is attained at a sample point, approaching from either side.
inline double ks_statistic(const std::vector<double>& sorted,
                           const std::function<double(double)>& cdf) {
  const size_t n = sorted.size();
  if (n == 0) throw std::domain_error("ks_statistic: empty sample");
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - double(i) / double(n),
                             double(i + 1) / double(n) - f));
  }
  return d;
}

// sup_x |F_a(x) - F_b(x)| between two sorted samples, by the usual merge
// walk over the pooled order statistics
inline double ks_statistic_two(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::domain_error("ks_statistic_two: empty sample");
  }
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) -
                             double(j) / double(b.size())));
  }
  return d;
}

// asymptotic p-values: P(D > d) ~ Q(sqrt(n_eff) d), with n_eff = n for
// one sample and n m/(n+m) for two
inline double ks_p_value(double d, double n_eff) {
  if (!(n_eff > 0.0)) throw std::domain_error("ks_p_value: n_eff <= 0");
  return kolmogorov_q(std::sqrt(n_eff) * d);
}

// level-alpha critical distance: the d with Q(sqrt(n_eff) d) = alpha,
// by bisection (Q is strictly decreasing)
inline double ks_critical(double alpha, double n_eff) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(n_eff > 0.0)) {
    throw std::domain_error("ks_critical: need 0 < alpha < 1, n_eff > 0");
  }
  double lo = 1e-6, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_q(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(n_eff);
}

inline double two_sample_n_eff(size_t n, size_t m) {
  return double(n) * double(m) / double(n + m);
}

struct KsReport {
  uint64_t samples = 0;
  double statistic = 0.0;
  double p_value = 0.0;
  std::string reference;  // which CDF the samples were held against
  int n = 0;              // lattice size behind the samples, 0 if n/a
};

}  // namespace polymerlab
