#pragma once

// Point-to-point directed polymer on the N x N lattice: exact log-partition
// function by dynamic programming in log space, the scaled free energy
// h = (log Z - N F)/(sigma N^{1/3}), Gibbs-measure diagnostics (site
// occupation probabilities, exact path sampling, the derivative recurrence
// P_{i+1} = P_i' p(1-p)), and deterministic Monte Carlo ensembles.
//
// Paths go from (1,1) to (n,n) in up/right steps; every path visits 2n-1
// sites and crosses each anti-diagonal i+j = c exactly once. The site
// factor in Z is e^{xi}, and raw Z is never materialized: at theta = 2,
// N = 64 already has log Z ~ 74.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polymerlab/rng.hpp"
#include "polymerlab/specfun.hpp"
#include "polymerlab/weights.hpp"

namespace polymerlab {

inline double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct DisorderGrid {
  int n = 0;
  std::vector<double> weights;  // row-major, site (i,j) 1-based
  WeightFamily family = WeightFamily::exp_gamma(2.0);
  uint64_t seed = 0;
  uint64_t replica = 0;

  double& at(int i, int j) { return weights[size_t(i - 1) * n + (j - 1)]; }
  double at(int i, int j) const { return weights[size_t(i - 1) * n + (j - 1)]; }
};

// Each site draws from its own counter stream keyed by (seed, replica, i, j),
// so a grid is reproducible site by site no matter how replicas are split
// across workers, and two families replayed on the same keys share their
// base randomness.
inline DisorderGrid make_grid(int n, const WeightFamily& family, uint64_t seed,
                              uint64_t replica = 0) {
  if (n < 1) throw std::domain_error("make_grid: n < 1");
  DisorderGrid g;
  g.n = n;
  g.family = family;
  g.seed = seed;
  g.replica = replica;
  g.weights.resize(size_t(n) * n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      RngStream rng = RngStream::for_site(seed, replica, i, j);
      g.at(i, j) = family.sample(rng);
    }
  }
  return g;
}

struct FreeEnergyScale {
  double theta = 0.0;
  double f = 0.0;            // F = -2 Psi(theta/2)
  double sigma = 0.0;        // (-Psi''(theta/2))^{1/3}
  double tilde_sigma = 0.0;  // sigma * n^{1/3}
  int n = 0;

  static FreeEnergyScale for_theta(double theta, int n) {
    if (!(theta > 0.0) || n < 1) {
      throw std::domain_error("FreeEnergyScale: need theta > 0, n >= 1");
    }
    FreeEnergyScale s;
    s.theta = theta;
    s.n = n;
    s.f = -2.0 * digamma(0.5 * theta);
    s.sigma = std::cbrt(-polygamma(2, 0.5 * theta));  // Psi'' < 0 on (0,inf)
    s.tilde_sigma = s.sigma * std::cbrt(double(n));
    return s;
  }
};

// log Z by the log-space corner recursion; exact up to round-off.
inline double log_partition(const DisorderGrid& grid) {
  const int n = grid.n;
  if (n < 1) throw std::domain_error("log_partition: empty grid");
  std::vector<double> row(n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      double prev;
      if (i == 1 && j == 1) {
        prev = 0.0;
      } else if (i == 1) {
        prev = row[j - 2];
      } else if (j == 1) {
        prev = row[j - 1];
      } else {
        prev = log_sum_exp(row[j - 1], row[j - 2]);
      }
      row[j - 1] = grid.at(i, j) + prev;
    }
  }
  return row[n - 1];
}

inline double scaled_h(double log_z, const FreeEnergyScale& scale) {
  if (!(scale.tilde_sigma > 0.0)) {
    throw std::domain_error("scaled_h: tilde_sigma <= 0");
  }
  return (log_z - scale.n * scale.f) / scale.tilde_sigma;
}

// Zero-mean families play the role of the centered exp-gamma field, whose
// log Z differs from the uncentered one by exactly (2n-1) Psi(theta) (every
// path carries 2n-1 sites). The scaled h is defined against the uncentered
// normalization, so their log Z gets shifted down by that amount.
inline double center_offset(const WeightFamily& family, int n) {
  if (family.mean() == 0.0) {
    return -(2.0 * n - 1.0) * digamma(family.theta());
  }
  return 0.0;
}

struct PathSample {
  std::vector<std::pair<int, int>> sites;  // (i,j), 1-based, (1,1) first
};

struct EmpiricalDistribution {
  std::vector<double> samples;  // h values, sorted ascending
  uint64_t replicas = 0;
  int n = 0;
  double theta = 0.0;
  uint64_t base_seed = 0;
  std::string family;

  // right-continuous empirical CDF: fraction of samples <= x
  double cdf(double x) const {
    const auto it = std::upper_bound(samples.begin(), samples.end(), x);
    return double(it - samples.begin()) / double(samples.size());
  }
};

inline EmpiricalDistribution simulate_ensemble(int n, const WeightFamily& family,
                                               uint64_t replicas,
                                               uint64_t base_seed,
                                               int workers = 1) {
  if (replicas < 1) throw std::domain_error("simulate_ensemble: replicas < 1");
  if (workers < 1) workers = 1;
  const FreeEnergyScale scale = FreeEnergyScale::for_theta(family.theta(), n);
  const double offset = center_offset(family, n);
  std::vector<double> h(replicas);
  auto run = [&](uint64_t lo, uint64_t hi) {
    for (uint64_t r = lo; r < hi; ++r) {
      const DisorderGrid g = make_grid(n, family, base_seed, r);
      h[r] = scaled_h(log_partition(g) + offset, scale);
    }
  };
  if (workers == 1) {
    run(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const uint64_t chunk = (replicas + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const uint64_t lo = std::min<uint64_t>(w * chunk, replicas);
      const uint64_t hi = std::min<uint64_t>(lo + chunk, replicas);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  EmpiricalDistribution dist;
  dist.samples = std::move(h);
  std::sort(dist.samples.begin(), dist.samples.end());
  dist.replicas = replicas;
  dist.n = n;
  dist.theta = family.theta();
  dist.base_seed = base_seed;
  dist.family = family.describe();
  return dist;
}

namespace detail {

// forward[i][j] = log sum over paths (1,1)->(i,j) of exp(path weight),
// site (i,j) included
inline std::vector<double> forward_table(const DisorderGrid& grid) {
  const int n = grid.n;
  std::vector<double> f(size_t(n) * n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      double prev;
      if (i == 1 && j == 1) prev = 0.0;
      else if (i == 1) prev = f[size_t(i - 1) * n + (j - 2)];
      else if (j == 1) prev = f[size_t(i - 2) * n + (j - 1)];
      else prev = log_sum_exp(f[size_t(i - 2) * n + (j - 1)],
                              f[size_t(i - 1) * n + (j - 2)]);
      f[size_t(i - 1) * n + (j - 1)] = grid.at(i, j) + prev;
    }
  }
  return f;
}

// backward[i][j] = log sum over paths (i,j)->(n,n), site (i,j) included
inline std::vector<double> backward_table(const DisorderGrid& grid) {
  const int n = grid.n;
  std::vector<double> b(size_t(n) * n);
  for (int i = n; i >= 1; --i) {
    for (int j = n; j >= 1; --j) {
      double next;
      if (i == n && j == n) next = 0.0;
      else if (i == n) next = b[size_t(i - 1) * n + j];
      else if (j == n) next = b[size_t(i) * n + (j - 1)];
      else next = log_sum_exp(b[size_t(i) * n + (j - 1)],
                              b[size_t(i - 1) * n + j]);
      b[size_t(i - 1) * n + (j - 1)] = grid.at(i, j) + next;
    }
  }
  return b;
}

}  // namespace detail

// Gibbs probability that the path visits (i,j): paths through the site
// carry forward + backward weight with the site factor counted once.
inline double site_occupation(const DisorderGrid& grid, int i, int j) {
  const int n = grid.n;
  if (i < 1 || i > n || j < 1 || j > n) {
    throw std::domain_error("site_occupation: site outside grid");
  }
  const auto fwd = detail::forward_table(grid);
  const auto bwd = detail::backward_table(grid);
  const double log_z = fwd[size_t(n - 1) * n + (n - 1)];
  const double lp = fwd[size_t(i - 1) * n + (j - 1)] +
                    bwd[size_t(i - 1) * n + (j - 1)] - grid.at(i, j) - log_z;
  return std::exp(std::min(lp, 0.0));
}

// All occupation probabilities at once (row-major like the grid).
inline std::vector<double> occupation_table(const DisorderGrid& grid) {
  const int n = grid.n;
  const auto fwd = detail::forward_table(grid);
  const auto bwd = detail::backward_table(grid);
  const double log_z = fwd[size_t(n - 1) * n + (n - 1)];
  std::vector<double> p(size_t(n) * n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const size_t idx = size_t(i - 1) * n + (j - 1);
      p[idx] = std::exp(std::min(fwd[idx] + bwd[idx] - grid.at(i, j) - log_z, 0.0));
    }
  }
  return p;
}

// d^m/dy^m log Z(y) at y = xi_{site} for m = 1..order. Writing p for the
// occupation probability of the site, d/dy log Z = p and dp/dy = p(1-p),
// so the m-th derivative is a fixed polynomial P_m(p) with
// P_{m+1} = P_m' * p(1-p). Polynomials are built in coefficient form.
inline std::vector<double> logZ_derivatives(const DisorderGrid& grid, int i,
                                            int j, int order) {
  if (order < 1 || order > 8) {
    throw std::domain_error("logZ_derivatives: order must be in 1..8");
  }
  const double p = site_occupation(grid, i, j);
  std::vector<double> out(order);
  std::vector<double> poly{0.0, 1.0};  // P_1(p) = p
  for (int m = 1; m <= order; ++m) {
    double val = 0.0;
    for (size_t c = poly.size(); c-- > 0;) val = val * p + poly[c];
    out[m - 1] = val;
    if (m == order) break;
    // P' then multiply by (p - p^2)
    std::vector<double> deriv(poly.size() > 1 ? poly.size() - 1 : 1, 0.0);
    for (size_t c = 1; c < poly.size(); ++c) deriv[c - 1] = poly[c] * double(c);
    std::vector<double> next(deriv.size() + 2, 0.0);
    for (size_t c = 0; c < deriv.size(); ++c) {
      next[c + 1] += deriv[c];
      next[c + 2] -= deriv[c];
    }
    poly = std::move(next);
  }
  return out;
}

// Exact Gibbs draw by backward sampling along the forward table: from
// (n,n), step to the predecessor with probability proportional to its
// forward weight.
inline PathSample sample_path(const DisorderGrid& grid, RngStream& rng) {
  const int n = grid.n;
  const auto fwd = detail::forward_table(grid);
  PathSample path;
  path.sites.reserve(2 * n - 1);
  int i = n, j = n;
  path.sites.emplace_back(i, j);
  while (i > 1 || j > 1) {
    bool step_up;  // predecessor (i-1, j)
    if (i == 1) {
      step_up = false;
    } else if (j == 1) {
      step_up = true;
    } else {
      const double lu = fwd[size_t(i - 2) * n + (j - 1)];
      const double ll = fwd[size_t(i - 1) * n + (j - 2)];
      const double p_up = 1.0 / (1.0 + std::exp(ll - lu));
      step_up = rng.u01() < p_up;
    }
    if (step_up) --i; else --j;
    path.sites.emplace_back(i, j);
  }
  std::reverse(path.sites.begin(), path.sites.end());
  return path;
}

struct DisplacementSummary {
  double mean = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  uint64_t count = 0;
};

// Transversal displacement |i - j|/2 at the midpoint anti-diagonal
// i + j = n + 1 (every path crosses it exactly once). Exploratory output.
inline DisplacementSummary midpoint_displacement(
    const std::vector<PathSample>& paths, int n) {
  DisplacementSummary s;
  std::vector<double> d;
  d.reserve(paths.size());
  for (const PathSample& path : paths) {
    for (const auto& [i, j] : path.sites) {
      if (i + j == n + 1) {
        d.push_back(0.5 * std::abs(i - j));
        break;
      }
    }
  }
  if (d.empty()) return s;
  std::sort(d.begin(), d.end());
  s.count = d.size();
  for (double v : d) s.mean += v;
  s.mean /= double(d.size());
  s.median = d[d.size() / 2];
  s.q90 = d[size_t(0.9 * double(d.size() - 1))];
  return s;
}

enum class TestFunction { SmoothBump, Tanh, GaussianCdf };

inline double test_function(TestFunction id, double x) {
  switch (id) {
    case TestFunction::SmoothBump:
      // C^infty bump supported on (-3, 3)
      if (std::abs(x) >= 3.0) return 0.0;
      return std::exp(-1.0 / (1.0 - x * x / 9.0));
    case TestFunction::Tanh:
      return std::tanh(x);
    case TestFunction::GaussianCdf:
      return 0.5 * std::erfc(-x / std::sqrt(2.0));
  }
  return 0.0;
}

struct GapEstimate {
  double gap = 0.0;       // |mean difference|
  double se = 0.0;        // standard error of the mean difference
  uint64_t replicas = 0;
};

// |E[phi(h_A)] - E[phi(h_B)]| estimated with common random numbers: both
// families replay the same per-site streams, so a perturbed family shares
// its base field with the unperturbed one replica by replica.
inline GapEstimate lindeberg_gap(const WeightFamily& fam_a,
                                 const WeightFamily& fam_b, TestFunction phi,
                                 int n, uint64_t replicas, uint64_t base_seed) {
  const FreeEnergyScale scale_a = FreeEnergyScale::for_theta(fam_a.theta(), n);
  const FreeEnergyScale scale_b = FreeEnergyScale::for_theta(fam_b.theta(), n);
  const double off_a = center_offset(fam_a, n);
  const double off_b = center_offset(fam_b, n);
  double mean = 0.0, m2 = 0.0;
  for (uint64_t r = 0; r < replicas; ++r) {
    const DisorderGrid ga = make_grid(n, fam_a, base_seed, r);
    const DisorderGrid gb = make_grid(n, fam_b, base_seed, r);
    const double ha = scaled_h(log_partition(ga) + off_a, scale_a);
    const double hb = scaled_h(log_partition(gb) + off_b, scale_b);
    const double d = test_function(phi, ha) - test_function(phi, hb);
    const double delta = d - mean;
    mean += delta / double(r + 1);
    m2 += delta * (d - mean);
  }
  GapEstimate est;
  est.replicas = replicas;
  est.gap = std::abs(mean);
  est.se = replicas > 1
               ? std::sqrt(m2 / double(replicas - 1) / double(replicas))
               : 0.0;
  return est;
}

// Monte Carlo estimate of E[e^{-u Z}] with u passed as log u; each replica
// contributes exp(-e^{log Z + log u}), evaluated in log space so huge Z
// underflows cleanly to 0.
struct LaplaceEstimate {
  double mean = 0.0;
  double se = 0.0;
  uint64_t replicas = 0;
};

inline LaplaceEstimate monte_carlo_laplace(int n, const WeightFamily& family,
                                           double log_u, uint64_t replicas,
                                           uint64_t base_seed, int workers = 1) {
  if (workers < 1) workers = 1;
  std::vector<double> vals(replicas);
  auto run = [&](uint64_t lo, uint64_t hi) {
    for (uint64_t r = lo; r < hi; ++r) {
      const DisorderGrid g = make_grid(n, family, base_seed, r);
      const double e = log_partition(g) + log_u;
      vals[r] = e > 700.0 ? 0.0 : std::exp(-std::exp(e));
    }
  };
  if (workers == 1) {
    run(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const uint64_t chunk = (replicas + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const uint64_t lo = std::min<uint64_t>(w * chunk, replicas);
      const uint64_t hi = std::min<uint64_t>(lo + chunk, replicas);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  double mean = 0.0, m2 = 0.0;
  for (uint64_t r = 0; r < replicas; ++r) {
    const double delta = vals[r] - mean;
    mean += delta / double(r + 1);
    m2 += delta * (vals[r] - mean);
  }
  LaplaceEstimate est;
  est.mean = mean;
  est.replicas = replicas;
  est.se = replicas > 1
               ? std::sqrt(m2 / double(replicas - 1) / double(replicas))
               : 0.0;
  return est;
}

}  // namespace polymerlab
