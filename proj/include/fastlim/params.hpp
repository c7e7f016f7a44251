#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "fastlim/errors.hpp"

namespace fastlim {

/// Parameters of the dimensional 5-, 4- and 3-species systems.
/// Every entry must be strictly positive.
struct DimensionalParams {
  double r = 1.0;        // prey growth rate
  double K = 1.0;        // prey carrying capacity
  double alpha = 1.0;    // predation rate of searching meso-predators
  double c = 1.0;        // top-predator interference on predation
  double gamma = 1.0;    // handling -> searching rate, meso-predators
  double Gamma = 1.0;    // birth rate from handling meso-predators
  double mu = 1.0;       // meso-predator mortality
  double beta = 1.0;     // predation rate of searching top predators
  double eta = 1.0;      // handling -> searching rate, top predators
  double s = 1.0;        // top-predator growth rate
  double m = 1.0;        // Leslie-Gower capacity ratio
  double delta = 1.0;    // meso-predator switch time scale
  double epsilon = 1.0;  // top-predator switch time scale
  double d1 = 1.0;
  double d2_search = 1.0;
  double d2_handle = 1.0;
  double d3_search = 1.0;
  double d3_handle = 1.0;
};

/// Parameters of the rescaled macroscopic system in (u, v, w).
struct DimensionlessParams {
  double b = 1.0;
  double n = 1.0;
  double q = 1.0;
  double s = 1.0;
  double d = 1.0;
  double e = 1.0;
  double c = 1.0;
  double D1 = 1.0;
  double D2_search = 1.0;
  double D2_handle = 1.0;
  double D3_search = 1.0;
  double D3_handle = 1.0;
};

template <class P>
struct ParamField {
  std::string_view key;
  double P::*member;
};

/// Configuration key of every dimensional parameter, in declaration order.
inline constexpr std::array<ParamField<DimensionalParams>, 18> kDimensionalFields{{
    {"r_tilde", &DimensionalParams::r},
    {"K", &DimensionalParams::K},
    {"alpha_tilde", &DimensionalParams::alpha},
    {"c_tilde", &DimensionalParams::c},
    {"gamma_tilde", &DimensionalParams::gamma},
    {"Gamma", &DimensionalParams::Gamma},
    {"mu_tilde", &DimensionalParams::mu},
    {"beta_tilde", &DimensionalParams::beta},
    {"eta_tilde", &DimensionalParams::eta},
    {"s_tilde", &DimensionalParams::s},
    {"m_tilde", &DimensionalParams::m},
    {"delta", &DimensionalParams::delta},
    {"epsilon", &DimensionalParams::epsilon},
    {"d1", &DimensionalParams::d1},
    {"d2_1", &DimensionalParams::d2_search},
    {"d2_2", &DimensionalParams::d2_handle},
    {"d3_1", &DimensionalParams::d3_search},
    {"d3_2", &DimensionalParams::d3_handle},
}};

inline constexpr std::array<ParamField<DimensionlessParams>, 12> kDimensionlessFields{{
    {"b", &DimensionlessParams::b},
    {"n", &DimensionlessParams::n},
    {"q", &DimensionlessParams::q},
    {"s", &DimensionlessParams::s},
    {"d", &DimensionlessParams::d},
    {"e", &DimensionlessParams::e},
    {"c", &DimensionlessParams::c},
    {"D1", &DimensionlessParams::D1},
    {"D2_1", &DimensionlessParams::D2_search},
    {"D2_2", &DimensionlessParams::D2_handle},
    {"D3_1", &DimensionlessParams::D3_search},
    {"D3_2", &DimensionlessParams::D3_handle},
}};

namespace detail {

template <class P, std::size_t N>
void validate_positive(const P& p, const std::array<ParamField<P>, N>& fields) {
  for (const auto& f : fields) {
    const double x = p.*(f.member);
    if (!std::isfinite(x) || !(x > 0.0)) {
      throw InvalidArgument("parameter '" + std::string(f.key) + "' must be positive and finite");
    }
  }
}

}  // namespace detail

inline void validate(const DimensionalParams& p) { detail::validate_positive(p, kDimensionalFields); }
inline void validate(const DimensionlessParams& p) { detail::validate_positive(p, kDimensionlessFields); }

/// Rescaling of the macroscopic system. `L` is the domain diameter.
inline DimensionlessParams nondimensionalize(const DimensionalParams& p, double L) {
  validate(p);
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("domain diameter must be positive");
  DimensionlessParams q;
  q.b = p.gamma / (p.alpha * p.K);
  q.n = p.eta * p.gamma / (p.beta * p.r * p.K);
  q.q = p.Gamma / p.r;
  q.s = p.s / p.r;
  q.d = p.mu / p.Gamma;
  q.e = p.m * p.eta / p.Gamma;
  q.c = p.c * p.m * p.r / p.alpha;
  const double scale = p.r * L * L;
  q.D1 = p.d1 / scale;
  q.D2_search = p.d2_search / scale;
  q.D2_handle = p.d2_handle / scale;
  q.D3_search = p.d3_search / scale;
  q.D3_handle = p.d3_handle / scale;
  return q;
}

/// Density scales: P = K u, M = (K r / gamma) v, T = (m r K / gamma) w.
struct DensityScales {
  double prey;
  double meso;
  double top;
};

inline DensityScales density_scales(const DimensionalParams& p) {
  return {p.K, p.K * p.r / p.gamma, p.m * p.r * p.K / p.gamma};
}

}  // namespace fastlim
