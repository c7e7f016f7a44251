#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "fastlim/cubic.hpp"
#include "fastlim/equilibria.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"

namespace fastlim::oracle {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// Every dimensionless parameter drawn log-uniformly from [lo, hi].
inline DimensionlessParams random_dimensionless(std::mt19937_64& rng, double lo = 1e-2, double hi = 1e2) {
  DimensionlessParams p;
  for (const auto& f : kDimensionlessFields) p.*(f.member) = log_uniform(rng, lo, hi);
  return p;
}

inline DimensionalParams random_dimensional(std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  DimensionalParams p;
  for (const auto& f : kDimensionalFields) p.*(f.member) = log_uniform(rng, lo, hi);
  return p;
}

/// Largest real part of the roots of l^3 - i1 l^2 + i2 l - i3 from the
/// eigenvalues of its companion matrix.
inline double companion_max_real(const Invariants& inv) {
  Eigen::Matrix3d c;
  c << inv.i1, -inv.i2, inv.i3,
       1.0, 0.0, 0.0,
       0.0, 1.0, 0.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> es(c, false);
  return es.eigenvalues().real().maxCoeff();
}

/// Brute-force interior equilibria: sign changes of the predator balance
/// along the prey nullcline, sampled at `points` interior points of (0, 1).
/// Uses the model's reaction kernel directly.
inline std::vector<double> brute_force_interior_u(const DimensionlessParams& p, int points) {
  std::vector<double> roots;
  double u_prev = 0.0;
  double g_prev = 0.0;
  bool have_prev = false;
  for (int i = 1; i < points; ++i) {
    const double u = static_cast<double>(i) / points;
    // prey nullcline with w = v: v = (1 - u)(b + u + c v)
    const double den = 1.0 - p.c * (1.0 - u);
    if (!(den > 0.0)) {
      have_prev = false;
      continue;
    }
    const double v = (1.0 - u) * (p.b + u) / den;
    const double g = macro3_dimless_local(p, u, v, v)[1] / (p.q * v);
    if (have_prev && ((g_prev < 0.0) != (g < 0.0))) roots.push_back(0.5 * (u_prev + u));
    u_prev = u;
    g_prev = g;
    have_prev = true;
  }
  return roots;
}

}  // namespace fastlim::oracle
