#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fastlim/errors.hpp"
#include "fastlim/grid.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

/// Micro5: (P, Ms, Mh, Ts, Th); Meso4: (P, Ms, Mh, T); Macro3: (P, M, T);
/// Macro3Dimless: (u, v, w).
enum class SystemKind { Micro5, Meso4, Macro3, Macro3Dimless };

inline constexpr std::size_t species_count(SystemKind k) noexcept {
  switch (k) {
    case SystemKind::Micro5: return 5;
    case SystemKind::Meso4: return 4;
    case SystemKind::Macro3:
    case SystemKind::Macro3Dimless: return 3;
  }
  return 0;
}

inline std::span<const std::string_view> species_names(SystemKind k) noexcept {
  static constexpr std::array<std::string_view, 5> micro{"P", "Ms", "Mh", "Ts", "Th"};
  static constexpr std::array<std::string_view, 4> meso{"P", "Ms", "Mh", "T"};
  static constexpr std::array<std::string_view, 3> macro{"P", "M", "T"};
  static constexpr std::array<std::string_view, 3> dimless{"u", "v", "w"};
  switch (k) {
    case SystemKind::Micro5: return micro;
    case SystemKind::Meso4: return meso;
    case SystemKind::Macro3: return macro;
    case SystemKind::Macro3Dimless: return dimless;
  }
  return {};
}

inline std::string_view kind_name(SystemKind k) noexcept {
  switch (k) {
    case SystemKind::Micro5: return "micro5";
    case SystemKind::Meso4: return "meso4";
    case SystemKind::Macro3: return "macro3";
    case SystemKind::Macro3Dimless: return "macro3_dimless";
  }
  return "";
}

/// Values below the denominator floor are treated as a solver failure.
inline constexpr double kDenominatorFloor = 1e-14;

struct SystemState {
  SystemKind kind = SystemKind::Macro3;
  std::vector<Field> species;

  SystemState() = default;
  SystemState(SystemKind k, std::vector<Field> fields) : kind(k), species(std::move(fields)) {
    if (species.size() != species_count(kind)) {
      throw InvalidArgument("state of kind " + std::string(kind_name(kind)) + " needs " +
                            std::to_string(species_count(kind)) + " species, got " +
                            std::to_string(species.size()));
    }
    for (const auto& f : species) {
      if (f.size() != species.front().size()) throw InvalidArgument("species live on different grids");
    }
  }

  /// Spatially homogeneous state.
  static SystemState constant(SystemKind k, const Grid& g, std::span<const double> values) {
    if (values.size() != species_count(k)) throw InvalidArgument("wrong number of species values");
    std::vector<Field> f;
    for (double v : values) f.emplace_back(g.size(), v);
    return {k, std::move(f)};
  }
  static SystemState constant(SystemKind k, const Grid& g, std::initializer_list<double> values) {
    return constant(k, g, std::span<const double>(values.begin(), values.size()));
  }

  std::size_t cells() const noexcept { return species.empty() ? 0 : species.front().size(); }
  Field& operator[](std::size_t i) { return species[i]; }
  const Field& operator[](std::size_t i) const { return species[i]; }

  bool all_finite() const noexcept {
    return std::all_of(species.begin(), species.end(), [](const Field& f) { return f.all_finite(); });
  }
  double min_value() const noexcept {
    double m = species.front().min();
    for (const auto& f : species) m = std::min(m, f.min());
    return m;
  }
  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& f : species) m = std::max(m, f.max_abs());
    return m;
  }

  SystemState& operator+=(const SystemState& o) {
    for (std::size_t s = 0; s < species.size(); ++s) species[s] += o.species[s];
    return *this;
  }
  /// this += a * o
  SystemState& axpy(double a, const SystemState& o) {
    for (std::size_t s = 0; s < species.size(); ++s) {
      auto& f = species[s];
      const auto& g = o.species[s];
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += a * g[i];
    }
    return *this;
  }

  bool operator==(const SystemState&) const = default;
};

namespace detail {

inline void expect_kind(const SystemState& st, SystemKind k, const Grid* g) {
  if (st.kind != k) {
    throw InvalidArgument("expected a " + std::string(kind_name(k)) + " state, got " +
                          std::string(kind_name(st.kind)));
  }
  if (g != nullptr && st.cells() != g->size()) throw InvalidArgument("state does not match grid");
  if (!st.all_finite()) throw NonFiniteValue(std::string(kind_name(k)) + ": non-finite state");
}

inline void check_floor(const Field& f, const char* what) {
  if (f.min() < kDenominatorFloor) {
    throw DivisionByVanishingDenominator(std::string(what) + " fell below the denominator floor");
  }
}

inline Field sum(const Field& a, const Field& b) { return a + b; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Micro5

/// Pointwise reaction terms of the five-species system, with the two
/// switching brackets kept separate so their cancellation is exact.
struct Micro5Local {
  double meso_switch;            // alpha P Ms / (1 + c (Ts+Th)) - gamma Mh
  double top_switch;             // beta (Ms+Mh) Ts - eta Th
  std::array<double, 5> slow;    // everything not multiplied by 1/delta or 1/eps
};

inline Micro5Local micro5_local(const DimensionalParams& p, double P, double Ms, double Mh, double Ts,
                                double Th) {
  const double M = Ms + Mh;
  const double Tsum = Ts + Th;
  const double uptake = p.alpha * P * Ms / (1.0 + p.c * Tsum);
  const double crowd = 1.0 - Tsum / (p.m * M);
  Micro5Local r{};
  r.meso_switch = uptake - p.gamma * Mh;
  r.top_switch = p.beta * M * Ts - p.eta * Th;
  r.slow = {p.r * (1.0 - P / p.K) * P - uptake,
            p.Gamma * Mh - p.mu * Ms - p.beta * Ms * Ts,
            -p.mu * Mh - p.beta * Mh * Ts,
            p.s * Ts * crowd,
            p.s * Th * crowd};
  return r;
}

inline SystemState reaction_micro5(const SystemState& st, const DimensionalParams& p) {
  detail::expect_kind(st, SystemKind::Micro5, nullptr);
  detail::check_floor(st[1] + st[2], "Ms + Mh");
  SystemState out = st;
  const double id = 1.0 / p.delta;
  const double ie = 1.0 / p.epsilon;
  for (std::size_t i = 0; i < st.cells(); ++i) {
    const auto loc = micro5_local(p, st[0][i], st[1][i], st[2][i], st[3][i], st[4][i]);
    out[0][i] = loc.slow[0];
    out[1][i] = loc.slow[1] - id * loc.meso_switch;
    out[2][i] = loc.slow[2] + id * loc.meso_switch;
    out[3][i] = loc.slow[3] - ie * loc.top_switch;
    out[4][i] = loc.slow[4] + ie * loc.top_switch;
  }
  return out;
}

inline SystemState diffusion_micro5(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  detail::expect_kind(st, SystemKind::Micro5, &g);
  const std::array<double, 5> d{p.d1, p.d2_search, p.d2_handle, p.d3_search, p.d3_handle};
  SystemState out = st;
  for (std::size_t s = 0; s < 5; ++s) out[s] = d[s] * laplacian(st[s], g);
  return out;
}

inline SystemState rhs_micro5(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  SystemState r = reaction_micro5(st, p);
  r += diffusion_micro5(st, p, g);
  return r;
}

// ---------------------------------------------------------------------------
// Meso4

/// Prey uptake term of the four-species system. `SearchingOnly` is the
/// eps -> 0 limit of the five-species system, alpha P Ms / (1 + c T).
/// `PrintedSaturating` uses alpha gamma P (Ms+Mh) / (gamma + alpha P + c gamma T)
/// instead, which agrees with the former only on the delta-constraint manifold.
enum class PreyUptake { SearchingOnly, PrintedSaturating };

struct Meso4Options {
  PreyUptake prey_uptake = PreyUptake::SearchingOnly;
};

/// Effective top-predator diffusivity (d3_1 eta + d3_2 beta M) / (eta + beta M).
inline double top_diffusivity(const DimensionalParams& p, double M) {
  return (p.d3_search * p.eta + p.d3_handle * p.beta * M) / (p.eta + p.beta * M);
}

struct Meso4Local {
  double meso_switch;
  std::array<double, 4> slow;
};

inline Meso4Local meso4_local(const DimensionalParams& p, double P, double Ms, double Mh, double T,
                              Meso4Options opt = {}) {
  const double M = Ms + Mh;
  const double switch_uptake = p.alpha * P * Ms / (1.0 + p.c * T);
  const double prey_loss = opt.prey_uptake == PreyUptake::SearchingOnly
                               ? switch_uptake
                               : p.alpha * p.gamma * P * M / (p.gamma + p.alpha * P + p.c * p.gamma * T);
  const double top_pred = p.beta * p.eta * T / (p.eta + p.beta * M);
  Meso4Local r{};
  r.meso_switch = switch_uptake - p.gamma * Mh;
  r.slow = {p.r * (1.0 - P / p.K) * P - prey_loss,
            p.Gamma * Mh - p.mu * Ms - top_pred * Ms,
            -p.mu * Mh - top_pred * Mh,
            p.s * T * (1.0 - T / (p.m * M))};
  return r;
}

inline SystemState reaction_meso4(const SystemState& st, const DimensionalParams& p,
                                  Meso4Options opt = {}) {
  detail::expect_kind(st, SystemKind::Meso4, nullptr);
  detail::check_floor(st[1] + st[2], "Ms + Mh");
  SystemState out = st;
  const double id = 1.0 / p.delta;
  for (std::size_t i = 0; i < st.cells(); ++i) {
    const auto loc = meso4_local(p, st[0][i], st[1][i], st[2][i], st[3][i], opt);
    out[0][i] = loc.slow[0];
    out[1][i] = loc.slow[1] - id * loc.meso_switch;
    out[2][i] = loc.slow[2] + id * loc.meso_switch;
    out[3][i] = loc.slow[3];
  }
  return out;
}

inline Field meso4_top_coefficient(const SystemState& st, const DimensionalParams& p) {
  Field coef(st.cells());
  for (std::size_t i = 0; i < st.cells(); ++i) coef[i] = top_diffusivity(p, st[1][i] + st[2][i]);
  return coef;
}

inline SystemState diffusion_meso4(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  detail::expect_kind(st, SystemKind::Meso4, &g);
  SystemState out = st;
  out[0] = p.d1 * laplacian(st[0], g);
  out[1] = p.d2_search * laplacian(st[1], g);
  out[2] = p.d2_handle * laplacian(st[2], g);
  out[3] = cross_diffusion(meso4_top_coefficient(st, p), st[3], g);
  return out;
}

inline SystemState rhs_meso4(const SystemState& st, const DimensionalParams& p, const Grid& g,
                             Meso4Options opt = {}) {
  SystemState r = reaction_meso4(st, p, opt);
  r += diffusion_meso4(st, p, g);
  return r;
}

// ---------------------------------------------------------------------------
// Macro3 (dimensional)

/// Effective meso-predator diffusivity
/// (d2_1 gamma (1 + c T) + d2_2 alpha P) / (gamma + alpha P + c gamma T).
inline double meso_diffusivity(const DimensionalParams& p, double P, double T) {
  return (p.d2_search * p.gamma * (1.0 + p.c * T) + p.d2_handle * p.alpha * P) /
         (p.gamma + p.alpha * P + p.c * p.gamma * T);
}

inline std::array<double, 3> macro3_local(const DimensionalParams& p, double P, double M, double T) {
  const double holling = p.alpha * P * M / (p.gamma + p.alpha * P + p.c * p.gamma * T);
  return {p.r * (1.0 - P / p.K) * P - p.gamma * holling,
          p.Gamma * holling - p.mu * M - p.eta * p.beta * M * T / (p.eta + p.beta * M),
          p.s * (1.0 - T / (p.m * M)) * T};
}

inline SystemState reaction_macro3(const SystemState& st, const DimensionalParams& p) {
  detail::expect_kind(st, SystemKind::Macro3, nullptr);
  detail::check_floor(st[1], "M");
  SystemState out = st;
  for (std::size_t i = 0; i < st.cells(); ++i) {
    const auto r = macro3_local(p, st[0][i], st[1][i], st[2][i]);
    for (std::size_t s = 0; s < 3; ++s) out[s][i] = r[s];
  }
  return out;
}

inline SystemState diffusion_macro3(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  detail::expect_kind(st, SystemKind::Macro3, &g);
  Field meso(st.cells());
  Field top(st.cells());
  for (std::size_t i = 0; i < st.cells(); ++i) {
    meso[i] = meso_diffusivity(p, st[0][i], st[2][i]);
    top[i] = top_diffusivity(p, st[1][i]);
  }
  SystemState out = st;
  out[0] = p.d1 * laplacian(st[0], g);
  out[1] = cross_diffusion(meso, st[1], g);
  out[2] = cross_diffusion(top, st[2], g);
  return out;
}

inline SystemState rhs_macro3(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  SystemState r = reaction_macro3(st, p);
  r += diffusion_macro3(st, p, g);
  return r;
}

// ---------------------------------------------------------------------------
// Macro3, dimensionless

inline std::array<double, 3> macro3_dimless_local(const DimensionlessParams& p, double u, double v,
                                                  double w) {
  const double den = p.b + u + p.c * w;
  return {u * (1.0 - u - v / den), p.q * v * (u / den - p.d - p.e * w / (p.n + v)),
          w * p.s * (1.0 - w / v)};
}

/// (D2_1 (b + c w) + D2_2 u) / (b + u + c w)
inline double dimless_meso_diffusivity(const DimensionlessParams& p, double u, double w) {
  return (p.D2_search * (p.b + p.c * w) + p.D2_handle * u) / (p.b + u + p.c * w);
}

/// (D3_1 n + D3_2 v) / (n + v)
inline double dimless_top_diffusivity(const DimensionlessParams& p, double v) {
  return (p.D3_search * p.n + p.D3_handle * v) / (p.n + v);
}

inline SystemState reaction_macro3_dimless(const SystemState& st, const DimensionlessParams& p) {
  detail::expect_kind(st, SystemKind::Macro3Dimless, nullptr);
  detail::check_floor(st[1], "v");
  SystemState out = st;
  for (std::size_t i = 0; i < st.cells(); ++i) {
    const auto r = macro3_dimless_local(p, st[0][i], st[1][i], st[2][i]);
    for (std::size_t s = 0; s < 3; ++s) out[s][i] = r[s];
  }
  return out;
}

inline SystemState diffusion_macro3_dimless(const SystemState& st, const DimensionlessParams& p,
                                            const Grid& g) {
  detail::expect_kind(st, SystemKind::Macro3Dimless, &g);
  Field meso(st.cells());
  Field top(st.cells());
  for (std::size_t i = 0; i < st.cells(); ++i) {
    meso[i] = dimless_meso_diffusivity(p, st[0][i], st[2][i]);
    top[i] = dimless_top_diffusivity(p, st[1][i]);
  }
  SystemState out = st;
  out[0] = p.D1 * laplacian(st[0], g);
  out[1] = cross_diffusion(meso, st[1], g);
  out[2] = cross_diffusion(top, st[2], g);
  return out;
}

inline SystemState rhs_macro3_dimless(const SystemState& st, const DimensionlessParams& p,
                                      const Grid& g) {
  SystemState r = reaction_macro3_dimless(st, p);
  r += diffusion_macro3_dimless(st, p, g);
  return r;
}

// ---------------------------------------------------------------------------
// Aggregation between the levels of description

/// (P, Ms, Mh, Ts, Th) -> (P, Ms, Mh, Ts + Th)
inline SystemState aggregate_top(const SystemState& micro) {
  detail::expect_kind(micro, SystemKind::Micro5, nullptr);
  return {SystemKind::Meso4, {micro[0], micro[1], micro[2], micro[3] + micro[4]}};
}

/// (P, Ms, Mh, T) -> (P, Ms + Mh, T)
inline SystemState aggregate_meso(const SystemState& meso) {
  detail::expect_kind(meso, SystemKind::Meso4, nullptr);
  return {SystemKind::Macro3, {meso[0], meso[1] + meso[2], meso[3]}};
}

/// Dimensional macroscopic state -> (u, v, w).
inline SystemState to_dimensionless(const SystemState& st, const DimensionalParams& p) {
  detail::expect_kind(st, SystemKind::Macro3, nullptr);
  const auto sc = density_scales(p);
  return {SystemKind::Macro3Dimless,
          {(1.0 / sc.prey) * st[0], (1.0 / sc.meso) * st[1], (1.0 / sc.top) * st[2]}};
}

inline SystemState to_dimensional(const SystemState& st, const DimensionalParams& p) {
  detail::expect_kind(st, SystemKind::Macro3Dimless, nullptr);
  const auto sc = density_scales(p);
  return {SystemKind::Macro3, {sc.prey * st[0], sc.meso * st[1], sc.top * st[2]}};
}

}  // namespace fastlim
