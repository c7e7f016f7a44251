#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "fastlim/errors.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

/// Homogeneous state (u, v, w) of the dimensionless macroscopic system.
struct Point3 {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  bool operator==(const Point3&) const = default;
};

inline constexpr double kEquilibriumResidualTol = 1e-10;
inline constexpr int kEquilibriumScanPoints = 2048;

/// Left-hand sides of the homogeneous steady-state system, outer factors included:
/// u [1 - u - v/(b+u+cw)], q v (u/(b+u+cw) - d - e w/(n+v)), w s (1 - w/v).
inline std::array<double, 3> equilibrium_residual(const DimensionlessParams& p, const Point3& x) {
  if (x.v == 0.0) throw InvalidArgument("equilibrium residual is undefined at v = 0");
  const double den = p.b + x.u + p.c * x.w;
  return {x.u * (1.0 - x.u - x.v / den), p.q * x.v * (x.u / den - p.d - p.e * x.w / (p.n + x.v)),
          x.w * p.s * (1.0 - x.w / x.v)};
}

inline double residual_inf(const std::array<double, 3>& r) {
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

/// E1 = (db/(1-d), b(1-d-db)/(1-d)^2, 0), top predator extinct; exists iff d + db < 1.
inline std::optional<Point3> boundary_equilibrium(const DimensionlessParams& p) {
  validate(p);
  if (!(p.d + p.d * p.b < 1.0)) return std::nullopt;
  const double om = 1.0 - p.d;
  return Point3{p.d * p.b / om, p.b * (1.0 - p.d - p.d * p.b) / (om * om), 0.0};
}

/// Scalar reduction of the interior steady state along w = v. The prey
/// equation gives v(u) = (1-u)(b+u) / (1 - c(1-u)); what remains is
/// F(u) = u/(b+u+c v(u)) - d - e v(u)/(n+v(u)) on (u_lo, 1].
class InteriorReduction {
 public:
  explicit InteriorReduction(const DimensionlessParams& p) : p_(p) {}

  /// Left end of the admissible interval, where 1 - c(1-u) reaches zero (or 0).
  double lower() const noexcept { return p_.c > 1.0 ? 1.0 - 1.0 / p_.c : 0.0; }
  double upper() const noexcept { return 1.0; }

  double denominator(double u) const noexcept { return 1.0 - p_.c * (1.0 - u); }
  double v(double u) const noexcept { return (1.0 - u) * (p_.b + u) / denominator(u); }

  double F(double u) const noexcept {
    const double vv = v(u);
    return u / (p_.b + u + p_.c * vv) - p_.d - p_.e * vv / (p_.n + vv);
  }

  double dF(double u) const noexcept {
    const double num = (1.0 - u) * (p_.b + u);
    const double den = denominator(u);
    const double vv = num / den;
    const double dv = ((1.0 - p_.b - 2.0 * u) * den - num * p_.c) / (den * den);
    const double s = p_.b + u + p_.c * vv;
    return (s - u * (1.0 + p_.c * dv)) / (s * s) - p_.e * p_.n * dv / ((p_.n + vv) * (p_.n + vv));
  }

 private:
  DimensionlessParams p_;
};

struct InteriorEquilibrium {
  Point3 point;                 // smallest-u root
  std::array<double, 3> residual{};
  int bracket_count = 0;        // sign changes of the scalar reduction
  std::vector<Point3> all;      // one entry per bracket, increasing u
};

/// Sign changes of F on `points` uniformly spaced samples of (u_lo, 1],
/// returned as [lo, hi] brackets. The left limit of F is always negative.
inline std::vector<std::array<double, 2>> scan_brackets(const InteriorReduction& red, int points) {
  std::vector<std::array<double, 2>> out;
  const double lo = red.lower();
  const double width = red.upper() - lo;
  double u_prev = lo;
  int sign_prev = -1;
  for (int i = 1; i <= points; ++i) {
    const double u = i == points ? red.upper() : lo + width * static_cast<double>(i) / points;
    const double f = red.F(u);
    if (!std::isfinite(f)) continue;
    const int sign = f > 0.0 ? 1 : (f < 0.0 ? -1 : 0);
    if (sign == 0) {
      out.push_back({u, u});
      sign_prev = -sign_prev;
    } else if (sign != sign_prev) {
      out.push_back({u_prev, u});
      sign_prev = sign;
    }
    u_prev = u;
  }
  return out;
}

namespace detail {

inline double refine_root(const InteriorReduction& red, double lo, double hi) {
  double flo = red.F(lo);
  if (red.F(hi) == 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo >= 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = red.F(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double f = red.F(u);
    const double df = red.dF(u);
    if (f == 0.0 || df == 0.0 || !std::isfinite(df)) break;
    const double cand = u - f / df;
    if (!(cand > lo - 1e-13 && cand < hi + 1e-13)) break;
    if (std::abs(red.F(cand)) >= std::abs(f)) break;
    u = cand;
  }
  return u;
}

}  // namespace detail

/// Interior (coexistence) equilibrium with w* = v*. Every bracket of the
/// scalar reduction is refined; the root with smallest u is reported.
inline InteriorEquilibrium interior_equilibrium(const DimensionlessParams& p,
                                                int scan_points = kEquilibriumScanPoints) {
  validate(p);
  const InteriorReduction red(p);
  const auto brackets = scan_brackets(red, scan_points);
  if (brackets.empty()) throw NoInteriorEquilibrium("scalar reduction has no sign change on (u_lo, 1)");

  InteriorEquilibrium out;
  out.bracket_count = static_cast<int>(brackets.size());
  for (const auto& br : brackets) {
    const double u = detail::refine_root(red, br[0], br[1]);
    if (std::abs(red.denominator(u)) < 1e-14) {
      throw DegenerateDenominator("1 - c(1-u) vanishes at a candidate root");
    }
    const double v = red.v(u);
    if (!(v > 0.0) || !(u > 0.0) || !(u < 1.0)) continue;
    out.all.push_back({u, v, v});
  }
  if (out.all.empty()) throw NoInteriorEquilibrium("no bracket yields a positive coexistence state");
  out.point = out.all.front();
  out.residual = equilibrium_residual(p, out.point);
  if (!(residual_inf(out.residual) < kEquilibriumResidualTol)) {
    throw NumericalFailure("interior equilibrium failed residual certification");
  }
  return out;
}

struct EquilibriumReport {
  std::optional<Point3> e1;
  bool e1_exists_condition = false;
  std::optional<Point3> estar;
  std::array<double, 3> estar_residual{};
  int bracket_count = 0;
  std::vector<Point3> estar_all;
};

inline EquilibriumReport find_equilibria(const DimensionlessParams& p) {
  EquilibriumReport r;
  r.e1_exists_condition = p.d + p.d * p.b < 1.0;
  r.e1 = boundary_equilibrium(p);
  try {
    auto in = interior_equilibrium(p);
    r.estar = in.point;
    r.estar_residual = in.residual;
    r.bracket_count = in.bracket_count;
    r.estar_all = std::move(in.all);
  } catch (const NoInteriorEquilibrium&) {
    r.bracket_count = 0;
  }
  return r;
}

}  // namespace fastlim
