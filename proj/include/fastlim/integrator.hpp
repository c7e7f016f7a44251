#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fastlim/errors.hpp"
#include "fastlim/grid.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

struct StepPolicy {
  double cfl_safety = 0.4;
  double relax_safety = 0.2;
  double dt_max = 1e-2;
  double t_end = 1.0;
  int snapshots = 200;           // number of stored snapshot intervals
  double negativity_tol = 1e-10; // relative to max(1, |state_0|_inf)
};

inline void validate(const StepPolicy& p) {
  if (!(p.cfl_safety > 0.0 && p.cfl_safety <= 1.0)) throw InvalidArgument("cfl_safety must lie in (0,1]");
  if (!(p.relax_safety > 0.0 && p.relax_safety <= 1.0)) {
    throw InvalidArgument("relax_safety must lie in (0,1]");
  }
  if (!(p.dt_max > 0.0) || !std::isfinite(p.dt_max)) throw InvalidArgument("dt_max must be positive");
  if (!(p.t_end > 0.0) || !std::isfinite(p.t_end)) throw InvalidArgument("t_end must be positive");
  if (p.snapshots < 1) throw InvalidArgument("snapshots must be at least 1");
  if (!(p.negativity_tol >= 0.0)) throw InvalidArgument("negativity_tol must be nonnegative");
}

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> snapshots;
  SystemState final;
  long steps = 0;
  long retries = 0;
};

/// Callbacks fired during integration. `on_snapshot` fires at t = 0 and at every
/// snapshot time; `on_step` fires at t = 0 and after every accepted step.
struct Observer {
  std::function<void(double, const SystemState&)> on_snapshot;
  std::function<void(double, const SystemState&)> on_step;
};

namespace detail {

inline double diffusion_limit(double h_min, int dim, double d_max, double safety) {
  return safety * h_min * h_min / (2.0 * dim * d_max);
}

}  // namespace detail

/// Largest admissible RK4 step: diffusion CFL, relaxation time scales of the
/// kinds that contain 1/delta or 1/epsilon terms, and dt_max.
inline double stable_dt(const DimensionalParams& p, const Grid& g, SystemKind kind, const StepPolicy& policy) {
  validate(policy);
  if (kind == SystemKind::Macro3Dimless) throw InvalidArgument("dimensionless system needs dimensionless parameters");
  const double d_max = std::max({p.d1, p.d2_search, p.d2_handle, p.d3_search, p.d3_handle});
  double dt = std::min(policy.dt_max, detail::diffusion_limit(g.min_spacing(), g.dim(), d_max, policy.cfl_safety));
  if (kind == SystemKind::Micro5 || kind == SystemKind::Meso4) dt = std::min(dt, policy.relax_safety * p.delta);
  if (kind == SystemKind::Micro5) dt = std::min(dt, policy.relax_safety * p.epsilon);
  return dt;
}

inline double stable_dt(const DimensionlessParams& p, const Grid& g, const StepPolicy& policy) {
  validate(policy);
  const double d_max = std::max({p.D1, p.D2_search, p.D2_handle, p.D3_search, p.D3_handle});
  return std::min(policy.dt_max, detail::diffusion_limit(g.min_spacing(), g.dim(), d_max, policy.cfl_safety));
}

template <class Rhs>
SystemState rk4_step(const Rhs& rhs, const SystemState& y, double h) {
  const SystemState k1 = rhs(y);
  SystemState y2 = y;
  y2.axpy(0.5 * h, k1);
  const SystemState k2 = rhs(y2);
  SystemState y3 = y;
  y3.axpy(0.5 * h, k2);
  const SystemState k3 = rhs(y3);
  SystemState y4 = y;
  y4.axpy(h, k3);
  const SystemState k4 = rhs(y4);
  SystemState out = y;
  out.axpy(h / 6.0, k1);
  out.axpy(h / 3.0, k2);
  out.axpy(h / 3.0, k3);
  out.axpy(h / 6.0, k4);
  return out;
}

/// Classical RK4 from t = 0 to policy.t_end with step `dt`. Steps are
/// truncated so that every snapshot time t_end * k / snapshots is hit exactly.
/// A step that leaves the nonnegative cone by more than the tolerance is
/// retried once as two half steps; a second breach is an error.
template <class Rhs>
Trajectory integrate(const Rhs& rhs, SystemState st0, double dt, const StepPolicy& policy,
                     const std::vector<Observer>& observers = {}) {
  validate(policy);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  if (!st0.all_finite()) throw NonFiniteState("initial state is not finite");
  const double tol = policy.negativity_tol * std::max(1.0, st0.max_abs());
  if (st0.min_value() < -tol) throw NegativityBreach("initial state has negative entries");

  auto admissible = [&](const SystemState& s) { return s.min_value() >= -tol; };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(st0);
  for (const auto& o : observers) {
    if (o.on_snapshot) o.on_snapshot(0.0, st0);
    if (o.on_step) o.on_step(0.0, st0);
  }

  SystemState y = std::move(st0);
  double t = 0.0;
  for (int k = 1; k <= policy.snapshots; ++k) {
    const double t_next = k == policy.snapshots ? policy.t_end
                                                : policy.t_end * static_cast<double>(k) / policy.snapshots;
    while (t < t_next) {
      double h = t_next - t;
      bool last = true;
      if (h > dt * (1.0 + 1e-12)) {
        h = dt;
        last = false;
      }
      SystemState next = rk4_step(rhs, y, h);
      if (!next.all_finite()) throw NonFiniteState("state became non-finite at t = " + std::to_string(t));
      if (!admissible(next)) {
        ++traj.retries;
        SystemState half = rk4_step(rhs, y, 0.5 * h);
        next = rk4_step(rhs, half, 0.5 * h);
        if (!next.all_finite()) throw NonFiniteState("state became non-finite at t = " + std::to_string(t));
        if (!admissible(next)) {
          throw NegativityBreach("state left the nonnegative cone at t = " + std::to_string(t) +
                                 " (min " + std::to_string(next.min_value()) + ")");
        }
      }
      y = std::move(next);
      t = last ? t_next : t + h;
      ++traj.steps;
      for (const auto& o : observers) {
        if (o.on_step) o.on_step(t, y);
      }
    }
    traj.times.push_back(t);
    traj.snapshots.push_back(y);
    for (const auto& o : observers) {
      if (o.on_snapshot) o.on_snapshot(t, y);
    }
  }
  traj.final = std::move(y);
  return traj;
}

}  // namespace fastlim
