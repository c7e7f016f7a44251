#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fastlim/cubic.hpp"
#include "fastlim/equilibria.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

/// Jacobian of the dimensionless reaction terms at `x` by central differences
/// (step 1e-6 (1 + |x_j|)) with one Richardson extrapolation.
inline Mat3 jacobian_at(const DimensionlessParams& p, const Point3& x) {
  const std::array<double, 3> x0{x.u, x.v, x.w};
  auto f = [&](const std::array<double, 3>& y) { return macro3_dimless_local(p, y[0], y[1], y[2]); };
  auto central = [&](int j, double h) {
    auto xp = x0;
    auto xm = x0;
    xp[j] += h;
    xm[j] -= h;
    const auto fp = f(xp);
    const auto fm = f(xm);
    std::array<double, 3> d{};
    for (int i = 0; i < 3; ++i) d[i] = (fp[i] - fm[i]) / (2.0 * h);
    return d;
  };
  Mat3 J{};
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x0[j]));
    const auto coarse = central(j, h);
    const auto fine = central(j, 0.5 * h);
    for (int i = 0; i < 3; ++i) J[i][j] = (4.0 * fine[i] - coarse[i]) / 3.0;
  }
  return J;
}

/// Closed-form Jacobian entries at the coexistence equilibrium as they are
/// usually printed. The printed a23 has (b+u+cv) unsquared in its first term;
/// `squared_a23` selects the variant with the square.
inline Mat3 printed_jacobian(const DimensionlessParams& p, const Point3& x, bool squared_a23 = false) {
  const double u = x.u;
  const double v = x.v;
  const double S = p.b + u + p.c * v;
  const double nv = p.n + v;
  Mat3 a{};
  a[0][0] = 1.0 - 2.0 * u - v * (p.b + p.c * v) / (S * S);
  a[0][1] = -u / S;
  a[0][2] = p.c * u * v / (S * S);
  a[1][0] = p.q * v * (p.b + p.c * v) / (S * S);
  a[1][1] = p.q * u / S - p.q * p.e * p.n * v / (nv * nv) - p.q * p.d;
  a[1][2] = -p.c * p.q * u * v / (squared_a23 ? S * S : S) - p.e * p.q * v / nv;
  a[2][0] = 0.0;
  a[2][1] = p.s;
  a[2][2] = -p.s;
  return a;
}

/// Linearization of the cross-diffusion fluxes at the equilibrium (v = w).
inline Mat3 diffusion_matrix(const DimensionlessParams& p, const Point3& x) {
  const double u = x.u;
  const double v = x.v;
  const double S = p.b + u + p.c * v;
  const double nv = p.n + v;
  Mat3 D{};
  D[0][0] = p.D1;
  D[1][0] = (p.D2_handle - p.D2_search) / (S * S) * (p.b + p.c * v) * v;
  D[1][1] = (p.D2_search * (p.b + p.c * v) + p.D2_handle * u) / S;
  D[1][2] = (p.D2_search - p.D2_handle) / (S * S) * p.c * u * v;
  D[2][1] = (p.D3_handle - p.D3_search) / (nv * nv) * p.n * v;
  D[2][2] = (p.D3_search * p.n + p.D3_handle * v) / nv;
  return D;
}

struct StabilityReport {
  Mat3 a{};          // finite-difference Jacobian (authoritative)
  Mat3 a_printed{};  // closed-form entries as printed
  Mat3 dmat{};
  Invariants inv0;
  bool rh_stable = false;
  double printed_mismatch = 0.0;          // max |a - a_printed| over all entries
  double printed_mismatch_other = 0.0;    // same, excluding a23
  double a23_squared_candidate = 0.0;     // a23 with the squared denominator
};

inline double max_abs_diff(const Mat3& x, const Mat3& y, bool skip_a23 = false) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (skip_a23 && i == 1 && j == 2) continue;
      m = std::max(m, std::abs(x[i][j] - y[i][j]));
    }
  return m;
}

inline StabilityReport analyze_stability(const DimensionlessParams& p, const Point3& estar) {
  StabilityReport r;
  r.a = jacobian_at(p, estar);
  r.a_printed = printed_jacobian(p, estar);
  r.a23_squared_candidate = printed_jacobian(p, estar, true)[1][2];
  r.dmat = diffusion_matrix(p, estar);
  r.inv0 = invariants3(r.a);
  r.rh_stable = routh_hurwitz(r.inv0);
  r.printed_mismatch = max_abs_diff(r.a, r.a_printed);
  r.printed_mismatch_other = max_abs_diff(r.a, r.a_printed, true);
  return r;
}

// ---------------------------------------------------------------------------
// Dispersion relation

/// Coefficients of the dispersion invariants as polynomials in x = k^2,
/// lowest degree first: T(x), I2(x), h(x) = det(L - x D).
struct DispersionPolynomials {
  std::array<double, 2> trace{};
  std::array<double, 3> minors{};
  std::array<double, 4> det{};
};

inline DispersionPolynomials dispersion_polynomials(const Mat3& L, const Mat3& D) {
  DispersionPolynomials out;
  out.trace = {L[0][0] + L[1][1] + L[2][2], -(D[0][0] + D[1][1] + D[2][2])};
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : pairs) {
    const int i = pr[0];
    const int j = pr[1];
    out.minors[0] += L[i][i] * L[j][j] - L[i][j] * L[j][i];
    out.minors[1] += -(L[i][i] * D[j][j] + D[i][i] * L[j][j]) + (L[i][j] * D[j][i] + D[i][j] * L[j][i]);
    out.minors[2] += D[i][i] * D[j][j] - D[i][j] * D[j][i];
  }
  // Multilinearity of det in columns: each column from L or from -x D.
  for (int mask = 0; mask < 8; ++mask) {
    Mat3 M{};
    int from_d = 0;
    for (int col = 0; col < 3; ++col) {
      const bool use_d = (mask >> col) & 1;
      from_d += use_d;
      for (int row = 0; row < 3; ++row) M[row][col] = use_d ? -D[row][col] : L[row][col];
    }
    out.det[static_cast<std::size_t>(from_d)] += det3(M);
  }
  return out;
}

enum class TuringClass { NoTuring, Turing, BaseUnstable };

inline const char* turing_class_name(TuringClass c) {
  switch (c) {
    case TuringClass::NoTuring: return "NoTuring";
    case TuringClass::Turing: return "Turing";
    case TuringClass::BaseUnstable: return "BaseUnstable";
  }
  return "";
}

struct DispersionCurve {
  std::vector<double> k2;
  std::vector<double> Tk;
  std::vector<double> I2k;
  std::vector<double> hk;
  std::vector<double> max_re_lambda;
  TuringClass classification = TuringClass::NoTuring;
  int violations = 0;        // sampled k^2 where a stability condition is reversed
  double k2max = 0.0;
  std::vector<double> candidates;  // analytic extremum locations that were added
};

/// All three dispersion stability conditions hold: T < 0, h < 0, T I2 - h < 0.
inline bool dispersion_stable(const Invariants& inv) {
  return inv.i1 < 0.0 && inv.i3 < 0.0 && inv.i1 * inv.i2 - inv.i3 < 0.0;
}

inline double default_k2max(const Invariants& inv0) { return 1e4 * std::max(1.0, inv0.i1 * inv0.i1); }

namespace detail {

/// Real roots of c0 + c1 x + c2 x^2 lying in (0, xmax].
inline void push_quadratic_roots(double c0, double c1, double c2, double xmax, std::vector<double>& out) {
  auto keep = [&](double x) {
    if (std::isfinite(x) && x > 0.0 && x <= xmax) out.push_back(x);
  };
  if (c2 == 0.0) {
    if (c1 != 0.0) keep(-c0 / c1);
    return;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (c1 + std::copysign(sq, c1));
  if (qq != 0.0) {
    keep(qq / c2);
    keep(c0 / qq);
  } else {
    keep(0.0);
  }
}

}  // namespace detail

/// Samples the dispersion cubic on a uniform k^2 grid over [0, k2max] plus the
/// stationary points of h(k^2) and of T I2 - h, and classifies the equilibrium.
inline DispersionCurve dispersion_scan(const DimensionlessParams& p, const Point3& estar,
                                       std::optional<double> k2max = std::nullopt, int samples = 1024) {
  if (samples < 16) throw InvalidArgument("dispersion scan needs at least 16 samples");
  const StabilityReport rep = analyze_stability(p, estar);
  DispersionCurve curve;
  curve.k2max = k2max.value_or(default_k2max(rep.inv0));
  if (!(curve.k2max > 0.0) || !std::isfinite(curve.k2max)) throw InvalidArgument("k2max must be positive");

  const auto poly = dispersion_polynomials(rep.a, rep.dmat);
  // g(x) = T(x) I2(x) - h(x), cubic.
  std::array<double, 4> g{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) g[static_cast<std::size_t>(i + j)] += poly.trace[i] * poly.minors[j];
  for (int i = 0; i < 4; ++i) g[i] -= poly.det[i];
  detail::push_quadratic_roots(poly.det[1], 2.0 * poly.det[2], 3.0 * poly.det[3], curve.k2max, curve.candidates);
  detail::push_quadratic_roots(g[1], 2.0 * g[2], 3.0 * g[3], curve.k2max, curve.candidates);

  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(samples) + curve.candidates.size());
  for (int i = 0; i < samples; ++i) xs.push_back(curve.k2max * static_cast<double>(i) / (samples - 1));
  xs.back() = curve.k2max;
  xs.insert(xs.end(), curve.candidates.begin(), curve.candidates.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  for (const double x : xs) {
    const Invariants inv = x == 0.0 ? rep.inv0 : invariants3(rep.a - x * rep.dmat);
    curve.k2.push_back(x);
    curve.Tk.push_back(inv.i1);
    curve.I2k.push_back(inv.i2);
    curve.hk.push_back(inv.i3);
    curve.max_re_lambda.push_back(max_real_eigenvalue(inv));
    if (!dispersion_stable(inv)) ++curve.violations;
  }
  if (!rep.rh_stable) {
    curve.classification = TuringClass::BaseUnstable;
  } else {
    curve.classification = curve.violations == 0 ? TuringClass::NoTuring : TuringClass::Turing;
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Sign bookkeeping behind the no-Turing argument

struct SignCheck {
  std::string name;
  double value = 0.0;  // left-hand side minus right-hand side
  bool strict = true;  // '<' (or '>') versus '<='
  bool passed = false;
};

/// Evaluates the two premises l33 > |l32|, |a12| > a13 and the three grouped
/// inequalities that control the sign of h(k^2).
inline std::vector<SignCheck> sign_ledger(const DimensionlessParams& p, const Point3& estar) {
  const Mat3 a = jacobian_at(p, estar);
  const Mat3 l = diffusion_matrix(p, estar);
  const double a12 = a[0][1], a13 = a[0][2], a21 = a[1][0];
  const double l21 = l[1][0], l32 = l[2][1], l33 = l[2][2];
  const double s = p.s;
  auto less = [](std::string name, double lhs, bool strict) {
    SignCheck c{std::move(name), lhs, strict, strict ? lhs < 0.0 : lhs <= 0.0};
    return c;
  };
  std::vector<SignCheck> out;
  out.push_back(less("l33 > |l32|", std::abs(l32) - l33, true));
  out.push_back(less("|a12| > a13", a13 - std::abs(a12), true));
  out.push_back(less("-l33 l21 a12 + l21 l32 a13 < 0", -l33 * l21 * a12 + l21 * l32 * a13, true));
  out.push_back(less("l33 a12 a21 - a13 l32 a21 <= 0", l33 * a12 * a21 - a13 * l32 * a21, false));
  out.push_back(less("-a13 l21 s - s l21 a12 <= 0", -a13 * l21 * s - s * l21 * a12, false));
  return out;
}

}  // namespace fastlim
