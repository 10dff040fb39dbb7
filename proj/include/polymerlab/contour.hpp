#pragma once

// Discretized integration contours with complex quadrature weights. Four
// shapes: the wedge C_v (two rays from the critical point at angles
// pi -+ phi), a vertical line, and the two Airy wedges (rays at 2pi/3 from
// the origin, rays at pi/3 from a small positive shift). All are oriented
// by increasing imaginary part and are symmetric under conjugation.
//
// Weights carry the full measure dz/(2 pi i), so a contour sum
// sum_k w_k f(z_k) approximates (1/2 pi i) \oint f(z) dz directly. For a
// conjugate node pair the weights are conjugate (the 1/i flips sign under
// conjugation and cancels the reversed traversal of the lower leg), which
// makes determinants of conjugate-symmetric kernels real to round-off.
//
// Quadrature is composite Gauss-Legendre over dyadic panels refined toward
// the apex, where integrands vary on the scale sigma N^{1/3} of the
// steepest-descent analysis.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polymerlab {

using cplx = std::complex<double>;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence; cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int g) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;
  if (g < 1) throw std::domain_error("gauss_legendre: order < 1");
  std::vector<double> x(g), w(g);
  for (int k = 0; k < g; ++k) {
    double xi = std::cos(M_PI * (k + 0.75) / (g + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = xi;
      for (int n = 2; n <= g; ++n) {
        const double p2 = ((2 * n - 1) * xi * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = g * (xi * p1 - p0) / (xi * xi - 1.0);
      const double step = p1 / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[g - 1 - k] = xi;  // cos runs downward; store nodes ascending
    w[g - 1 - k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  return cache.emplace(g, std::make_pair(std::move(x), std::move(w)))
      .first->second;
}

struct ContourSpec {
  enum class Kind { WedgeCv, VerticalCw, AiryWedgeIn, AiryWedgeOut };
  Kind kind = Kind::WedgeCv;
  double phi = M_PI / 4;     // WedgeCv leg angle
  double apex = 0.0;         // z_crit / line abscissa / Airy-out shift
  double length = 0.0;       // truncation, arc length per leg
  double fine_scale = 0.25;  // finest panel size at the apex
  double uniform_until = 0.0;  // keep panels at fine_scale out to here
  int m = 0;                 // actual node count (may round up the request)
  std::vector<cplx> nodes;
  std::vector<cplx> weights;  // Gauss-Legendre weight * dz / (2 pi i)
};

namespace detail {

inline std::vector<double> panel_breakpoints(double length, double fine,
                                             double uniform_until) {
  fine = std::min(std::max(fine, length * 1e-6), 0.5 * length);
  std::vector<double> b{0.0};
  // integrands with structure spread over a strip (not just at the apex)
  // need the fine panel width maintained across it before coarsening
  const double u = std::min(uniform_until, length);
  while (b.back() + fine < u) b.push_back(b.back() + fine);
  if (b.back() < u) b.push_back(u);
  if (b.size() == 1) b.push_back(std::min(fine, length));
  while (b.back() < length) b.push_back(std::min(2.0 * b.back(), length));
  return b;
}

// direction of the upper leg, as exp(i * angle)
inline double leg_angle(ContourSpec::Kind kind, double phi) {
  switch (kind) {
    case ContourSpec::Kind::WedgeCv: return M_PI - phi;
    case ContourSpec::Kind::VerticalCw: return 0.5 * M_PI;
    case ContourSpec::Kind::AiryWedgeIn: return 2.0 * M_PI / 3.0;
    case ContourSpec::Kind::AiryWedgeOut: return M_PI / 3.0;
  }
  return 0.0;
}

}  // namespace detail

inline ContourSpec build_contour(ContourSpec::Kind kind, double phi,
                                 double apex, double length, int m_request,
                                 double fine_scale,
                                 double uniform_until = 0.0) {
  if (!(length > 0.0)) throw std::domain_error("build_contour: length <= 0");
  ContourSpec c;
  c.kind = kind;
  c.phi = phi;
  c.apex = apex;
  c.length = length;
  c.fine_scale = fine_scale;
  c.uniform_until = uniform_until;
  const auto bpts = detail::panel_breakpoints(length, fine_scale, uniform_until);
  const int npanels = int(bpts.size()) - 1;
  const int g = std::max(3, (m_request + 2 * npanels - 1) / (2 * npanels));
  const auto& [gx, gw] = gauss_legendre(g);
  const cplx dir = std::polar(1.0, detail::leg_angle(kind, phi));
  const cplx inv2pii(0.0, -1.0 / (2.0 * M_PI));  // 1/(2 pi i)

  std::vector<cplx> up_nodes, up_weights;
  for (int p = 0; p < npanels; ++p) {
    const double a = bpts[p], b = bpts[p + 1];
    for (int k = 0; k < g; ++k) {
      const double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
      up_nodes.push_back(apex + s * dir);
      up_weights.push_back(0.5 * (b - a) * gw[k] * dir * inv2pii);
    }
  }
  // lower leg: conjugate mirror, traversed toward the apex so the whole
  // contour runs with increasing imaginary part
  for (size_t k = up_nodes.size(); k-- > 0;) {
    c.nodes.push_back(std::conj(up_nodes[k]));
    c.weights.push_back(std::conj(up_weights[k]));
  }
  c.nodes.insert(c.nodes.end(), up_nodes.begin(), up_nodes.end());
  c.weights.insert(c.weights.end(), up_weights.begin(), up_weights.end());
  c.m = int(c.nodes.size());
  return c;
}

inline ContourSpec make_wedge_cv(double z_crit, double phi, double length,
                                 int m, double fine_scale) {
  if (!(phi > 0.0 && phi <= M_PI / 4)) {
    throw std::domain_error("make_wedge_cv: phi outside (0, pi/4]");
  }
  return build_contour(ContourSpec::Kind::WedgeCv, phi, z_crit, length, m,
                       fine_scale);
}

inline ContourSpec make_vertical_cw(double x, double length, int m,
                                    double fine_scale,
                                    double uniform_until = 0.0) {
  return build_contour(ContourSpec::Kind::VerticalCw, 0.0, x, length, m,
                       fine_scale, uniform_until);
}

inline ContourSpec make_airy_wedge_in(double length, int m,
                                      double fine_scale = 0.25) {
  return build_contour(ContourSpec::Kind::AiryWedgeIn, 0.0, 0.0, length, m,
                       fine_scale);
}

inline ContourSpec make_airy_wedge_out(double shift, double length, int m,
                                       double fine_scale = 0.25) {
  if (!(shift > 0.0)) throw std::domain_error("make_airy_wedge_out: shift <= 0");
  return build_contour(ContourSpec::Kind::AiryWedgeOut, 0.0, shift, length, m,
                       fine_scale);
}

inline ContourSpec rebuild_contour(const ContourSpec& c, int m) {
  return build_contour(c.kind, c.phi, c.apex, c.length, m, c.fine_scale,
                       c.uniform_until);
}

// Endpoint-truncation search: env is the log-magnitude envelope of the
// integrand along a leg. Returns the first arc length past the envelope's
// maximum where it has dropped below target (envelopes here grow at most
// polynomially before their super-linear decay takes over).
inline double scan_truncation(const std::function<double(double)>& env,
                              double s_min, double s_max, double target) {
  const int steps = 800;
  double best = -1e300;
  double arg_best = s_min;
  for (int k = 0; k <= steps; ++k) {
    const double s =
        s_min * std::pow(s_max / s_min, double(k) / double(steps));
    const double e = env(s);
    if (e >= best) {
      best = e;
      arg_best = s;
    } else if (s > arg_best && e <= target) {
      return 1.1 * s;
    }
  }
  throw std::runtime_error(
      "scan_truncation: envelope never fell below target; contour unusable");
}

}  // namespace polymerlab
