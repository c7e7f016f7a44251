#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "fastlim/errors.hpp"

namespace fastlim {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

inline Mat3 operator*(double s, const Mat3& a) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}

inline double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Principal invariants: trace, sum of principal 2x2 minors, determinant.
struct Invariants {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
};

inline Invariants invariants3(const Mat3& m) {
  const double minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) + (m[0][0] * m[2][2] - m[0][2] * m[2][0]) +
                        (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
  return {m[0][0] + m[1][1] + m[2][2], minors, det3(m)};
}

/// All roots of l^3 - i1 l^2 + i2 l - i3 in the open left half-plane.
inline bool routh_hurwitz(const Invariants& inv) {
  return inv.i1 < 0.0 && inv.i3 < 0.0 && inv.i1 * inv.i2 - inv.i3 < 0.0;
}

namespace detail {

inline std::complex<double> char_poly(const Invariants& inv, std::complex<double> x) {
  return ((x - inv.i1) * x + inv.i2) * x - inv.i3;
}

inline std::complex<double> char_poly_deriv(const Invariants& inv, std::complex<double> x) {
  return (3.0 * x - 2.0 * inv.i1) * x + inv.i2;
}

}  // namespace detail

/// Roots of l^3 - i1 l^2 + i2 l - i3 = 0 by Cardano's formula in complex
/// arithmetic, each polished by up to two Newton steps. Throws if the
/// back-substituted residual exceeds 1e-8 times the sum of the magnitudes of
/// the polynomial's terms at the root (plus one).
inline std::array<std::complex<double>, 3> cubic_roots(const Invariants& inv) {
  using C = std::complex<double>;
  // Monic form x^3 + a x^2 + b x + c, shift x = t - a/3.
  const double a = -inv.i1;
  const double b = inv.i2;
  const double c = -inv.i3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const C disc = std::sqrt(C(q * q / 4.0 + p * p * p / 27.0));
  C u = std::pow(-q / 2.0 + disc, 1.0 / 3.0);
  const C u_alt = std::pow(-q / 2.0 - disc, 1.0 / 3.0);
  if (std::abs(u_alt) > std::abs(u)) u = u_alt;
  const C omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<C, 3> roots;
  if (std::abs(u) == 0.0) {
    roots = {C(-a / 3.0), C(-a / 3.0), C(-a / 3.0)};
  } else {
    C uk = u;
    for (auto& r : roots) {
      r = uk - p / (3.0 * uk) - a / 3.0;
      uk *= omega;
    }
  }
  for (auto& r : roots) {
    for (int it = 0; it < 2; ++it) {
      const C f = detail::char_poly(inv, r);
      const C df = detail::char_poly_deriv(inv, r);
      if (std::abs(df) == 0.0) break;
      const C cand = r - f / df;
      if (!(std::abs(detail::char_poly(inv, cand)) < std::abs(f))) break;
      r = cand;
    }
    const double mag = std::abs(r);
    const double terms = mag * mag * mag + std::abs(inv.i1) * mag * mag + std::abs(inv.i2) * mag + std::abs(inv.i3);
    if (!(std::abs(detail::char_poly(inv, r)) <= 1e-8 * (1.0 + terms))) {
      throw NumericalFailure("cubic root failed back-substitution check");
    }
  }
  return roots;
}

/// Largest real part among the roots of l^3 - T l^2 + I2 l - h.
inline double max_real_eigenvalue(const Invariants& inv) {
  const auto roots = cubic_roots(inv);
  return std::max({roots[0].real(), roots[1].real(), roots[2].real()});
}

}  // namespace fastlim
