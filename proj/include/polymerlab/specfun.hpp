#pragma once

// Complex log-gamma, digamma and polygamma, plus the real Airy function.
// Every kernel and scaling formula in the library funnels through these.
//
// Strategy for the Gamma-family functions: shift the argument up by the
// recurrence until the real part is large, then use the Stirling-type
// asymptotic series (DLMF 5.11.1, 5.11.2, 5.15.9). The defining series are
// kept in the test suite as slow oracles; they converge far too slowly for
// contour work where |Im z| can be ~50.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/airy.hpp>

namespace polymerlab {

using cplx = std::complex<double>;

inline constexpr double gamma_em = 0.57721566490153286061;  // Euler-Mascheroni

namespace detail {

// B_2, B_4, ..., B_30
inline constexpr double bernoulli2k[15] = {
    1.0 / 6,          -1.0 / 30,           1.0 / 42,
    -1.0 / 30,        5.0 / 66,            -691.0 / 2730,
    7.0 / 6,          -3617.0 / 510,       43867.0 / 798,
    -174611.0 / 330,  854513.0 / 138,      -236364091.0 / 2730,
    8553103.0 / 6,    -23749461029.0 / 870, 8615841276005.0 / 14322};

// Real part threshold beyond which the asymptotic tails are good to ~1e-16.
inline constexpr double asymptotic_re = 18.0;

inline void check_pole(const cplx& z, const char* fn) {
  if (z.imag() == 0.0 && z.real() <= 0.0 &&
      z.real() == std::floor(z.real())) {
    throw std::domain_error(std::string(fn) +
                            ": pole at nonpositive integer argument");
  }
}

}  // namespace detail

// Principal-branch log Gamma, continuous on Re(z) > 0. For Re(z) <= 0 the
// value may differ from the analytically continued branch by 2*pi*i*k; all
// downstream formulas exponentiate integer multiples of log-gamma sums, so
// only branch consistency matters there (and tests pin exactly that).
inline cplx log_gamma(cplx z) {
  detail::check_pole(z, "log_gamma");
  cplx shift_sum = 0.0;
  while (z.real() < detail::asymptotic_re) {
    shift_sum += std::log(z);
    z += 1.0;
  }
  const cplx zinv = 1.0 / z;
  const cplx zinv2 = zinv * zinv;
  cplx tail = 0.0;
  cplx p = zinv;
  for (int k = 1; k <= 15; ++k) {
    const cplx term = detail::bernoulli2k[k - 1] / double(2 * k * (2 * k - 1)) * p;
    tail += term;
    if (std::abs(term) < 1e-17 * std::abs(tail)) break;
    p *= zinv2;
  }
  const cplx stirling =
      (z - 0.5) * std::log(z) - z + 0.91893853320467274178 + tail;
  return stirling - shift_sum;
}

inline cplx digamma(cplx z) {
  detail::check_pole(z, "digamma");
  cplx shift_sum = 0.0;
  while (z.real() < detail::asymptotic_re) {
    shift_sum += 1.0 / z;
    z += 1.0;
  }
  const cplx zinv = 1.0 / z;
  const cplx zinv2 = zinv * zinv;
  cplx tail = 0.0;
  cplx p = zinv2;
  for (int k = 1; k <= 15; ++k) {
    const cplx term = detail::bernoulli2k[k - 1] / double(2 * k) * p;
    tail += term;
    if (std::abs(term) < 1e-17 * std::abs(tail)) break;
    p *= zinv2;
  }
  return std::log(z) - 0.5 * zinv - tail - shift_sum;
}

// k-th derivative of digamma, k >= 1.
inline cplx polygamma(int k, cplx z) {
  if (k < 1 || k > 32) {
    throw std::domain_error("polygamma: order must be in 1..32");
  }
  detail::check_pole(z, "polygamma");
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^{k-1}

  // Psi^{(k)}(z) = Psi^{(k)}(z+1) + (-1)^{k-1} k! / z^{k+1}
  cplx shift_sum = 0.0;
  while (z.real() < detail::asymptotic_re) {
    shift_sum += kfact / std::pow(z, double(k + 1));
    z += 1.0;
  }

  // (-1)^{k-1} [ (k-1)!/z^k + k!/(2 z^{k+1}) + sum B_2n (2n+k-1)!/((2n)! z^{2n+k}) ]
  const cplx zinv = 1.0 / z;
  const cplx zinv2 = zinv * zinv;
  cplx acc = (kfact / double(k)) * std::pow(zinv, double(k)) * (1.0 + 0.5 * double(k) * zinv);
  cplx p = std::pow(zinv, double(k)) * zinv2;
  double fact_ratio = 1.0;  // (2n+k-1)! / (2n)!  built iteratively
  for (int i = 2; i <= k + 1; ++i) fact_ratio *= i;
  fact_ratio /= 2.0;        // n=1 value: (k+1)!/2!
  double prev_mag = HUGE_VAL;
  for (int n = 1; n <= 15; ++n) {
    const cplx term = detail::bernoulli2k[n - 1] * fact_ratio * p;
    const double mag = std::abs(term);
    if (mag > prev_mag) break;  // past the optimal truncation point
    acc += term;
    if (mag < 1e-17 * std::abs(acc)) break;
    prev_mag = mag;
    p *= zinv2;
    fact_ratio *= double(2 * n + k) * double(2 * n + k + 1) /
                  (double(2 * n + 1) * double(2 * n + 2));
  }
  return sign * (acc + shift_sum);
}

inline double log_gamma(double x) { return log_gamma(cplx(x)).real(); }
inline double digamma(double x) { return digamma(cplx(x)).real(); }
inline double polygamma(int k, double x) { return polygamma(k, cplx(x)).real(); }

// Real Airy function and derivative on [-15, 15], the window the half-line
// Tracy-Widom determinant quadrature lives in.
inline double airy_ai(double x) {
  if (!(x >= -15.0 && x <= 15.0)) {
    throw std::domain_error("airy_ai: argument outside [-15, 15]");
  }
  return boost::math::airy_ai(x);
}

inline double airy_ai_prime(double x) {
  if (!(x >= -15.0 && x <= 15.0)) {
    throw std::domain_error("airy_ai_prime: argument outside [-15, 15]");
  }
  return boost::math::airy_ai_prime(x);
}

}  // namespace polymerlab
