#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "fastlim/errors.hpp"
#include "fastlim/grid.hpp"
#include "fastlim/integrator.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

/// L1 norm of eta Th - beta (Ms + Mh) Ts, the algebraic constraint of the eps -> 0 limit.
inline double constraint_residual_eps(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  detail::expect_kind(st, SystemKind::Micro5, &g);
  Field r(st.cells());
  for (std::size_t i = 0; i < st.cells(); ++i) {
    r[i] = p.eta * st[4][i] - p.beta * (st[1][i] + st[2][i]) * st[3][i];
  }
  return norm_l1(r, g);
}

/// L1 norm of alpha P Ms / (1 + c T) - gamma Mh, the quantity the 1/delta term drives to zero.
inline double constraint_residual_delta(const SystemState& st, const DimensionalParams& p, const Grid& g) {
  detail::expect_kind(st, SystemKind::Meso4, &g);
  Field r(st.cells());
  for (std::size_t i = 0; i < st.cells(); ++i) {
    r[i] = p.alpha * st[0][i] * st[1][i] / (1.0 + p.c * st[3][i]) - p.gamma * st[2][i];
  }
  return norm_l1(r, g);
}

struct OrderFit {
  double order = 0.0;
  int used = 0;
  int dropped = 0;  // points with y <= 0, excluded from the regression
};

/// Least-squares slope of log(ys) against log(xs).
inline OrderFit fit_order(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("fit_order: xs and ys differ in length");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw InvalidArgument("fit_order: xs must be positive");
    if (i > 0 && !(xs[i] < xs[i - 1])) throw InvalidArgument("fit_order: xs must be strictly decreasing");
    if (!(ys[i] >= 0.0)) throw InvalidArgument("fit_order: ys must be nonnegative");
  }
  OrderFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] == 0.0) {
      ++fit.dropped;
      continue;
    }
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.used;
  }
  if (fit.used < 2) throw InvalidArgument("fit_order: fewer than 2 usable points");
  const double n = fit.used;
  fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

enum class Knob { Epsilon, Delta };

struct ConvergenceTable {
  Knob knob = Knob::Epsilon;
  std::vector<double> values;
  std::vector<double> constraint_l1;  // space-time L1 of the constraint residual
  std::vector<double> state_gap;      // sup over snapshots of the spatial L2 gap
  std::optional<double> fitted_order_constraint;
  std::optional<double> fitted_order_gap;
};

/// Per-run diagnostics gathered alongside the table.
struct RunDiagnostics {
  double value = 0.0;             // eps or delta; 0 for the limit-system run
  double dt = 0.0;
  long steps = 0;
  long retries = 0;
  double min_meso = 0.0;          // min over time and space of Ms and Mh (or M)
  double top_search_l2 = 0.0;     // space-time L2 norm of Ts (eps sweep only)
  double top_handle_l2 = 0.0;     // space-time L2 norm of Th (eps sweep only)
  double prey_growth_ratio = 0.0; // max_t |P(t)|_inf / (e^{r t} |P_in|_inf)
};

struct SweepResult {
  ConvergenceTable table;
  std::vector<RunDiagnostics> runs;
  RunDiagnostics reference;
  std::vector<std::string> warnings;
};

struct SweepOptions {
  bool parallel = true;
};

namespace detail {

inline void check_decreasing(std::span<const double> values, const char* what) {
  if (values.empty()) throw InvalidArgument(std::string(what) + " list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InvalidArgument(std::string(what) + " values must be positive");
    }
    if (i > 0 && !(values[i] < values[i - 1])) {
      throw InvalidArgument(std::string(what) + " values must be strictly decreasing");
    }
  }
}

template <class E>
[[noreturn]] void rethrow_as(const E& e, const std::string& prefix) {
  throw E(prefix + e.what());
}

/// Re-raises a library error with `prefix` prepended, keeping its type.
[[noreturn]] inline void rethrow_annotated(const Error& e, const std::string& prefix) {
  if (auto* x = dynamic_cast<const NegativityBreach*>(&e)) rethrow_as(*x, prefix);
  if (auto* x = dynamic_cast<const NonFiniteState*>(&e)) rethrow_as(*x, prefix);
  if (auto* x = dynamic_cast<const DivisionByVanishingDenominator*>(&e)) rethrow_as(*x, prefix);
  if (auto* x = dynamic_cast<const NonFiniteValue*>(&e)) rethrow_as(*x, prefix);
  if (auto* x = dynamic_cast<const InvalidArgument*>(&e)) rethrow_as(*x, prefix);
  throw NumericalFailure(prefix + e.what());
}

/// Running trapezoid rule over the integrator's step callbacks.
class TimeQuadrature {
 public:
  void add(double t, double value) {
    if (started_) total_ += 0.5 * (t - t_prev_) * (value + v_prev_);
    started_ = true;
    t_prev_ = t;
    v_prev_ = value;
  }
  double total() const noexcept { return total_; }

 private:
  bool started_ = false;
  double t_prev_ = 0.0;
  double v_prev_ = 0.0;
  double total_ = 0.0;
};

inline double gap_l2(const SystemState& a, const SystemState& b, const Grid& g) {
  double sq = 0.0;
  for (std::size_t s = 0; s < a.species.size(); ++s) {
    const double n = norm_l2(a[s] - b[s], g);
    sq += n * n;
  }
  return std::sqrt(sq);
}

inline double prey_ratio(const SystemState& st, double t, double r, double p_in) {
  if (p_in == 0.0) return st[0].max_abs() == 0.0 ? 0.0 : INFINITY;
  return st[0].max_abs() / (std::exp(r * t) * p_in);
}

struct SingleRun {
  double constraint_l1 = 0.0;
  double gap = 0.0;
  RunDiagnostics diag;
};

template <class Fn>
std::vector<SingleRun> run_all(std::span<const double> values, const SweepOptions& opt, Fn&& fn,
                               const char* knob) {
  std::vector<SingleRun> out(values.size());
  auto guarded = [&](std::size_t i) {
    try {
      return fn(values[i]);
    } catch (const Error& e) {
      rethrow_annotated(e, std::string(knob) + " = " + std::to_string(values[i]) + ": ");
    }
  };
  if (opt.parallel && values.size() > 1) {
    std::vector<std::future<SingleRun>> futs;
    for (std::size_t i = 0; i < values.size(); ++i) futs.push_back(std::async(std::launch::async, guarded, i));
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = guarded(i);
  }
  return out;
}

inline void assemble(SweepResult& res, std::span<const double> values, const std::vector<SingleRun>& runs) {
  auto& t = res.table;
  t.values.assign(values.begin(), values.end());
  for (const auto& r : runs) {
    t.constraint_l1.push_back(r.constraint_l1);
    t.state_gap.push_back(r.gap);
    res.runs.push_back(r.diag);
  }
  if (values.size() < 2) return;
  auto try_fit = [&](const std::vector<double>& ys, const char* what) -> std::optional<double> {
    try {
      const auto fit = fit_order(t.values, ys);
      if (fit.dropped > 0) {
        res.warnings.push_back(std::string(what) + ": " + std::to_string(fit.dropped) + " zero entries excluded from fit");
      }
      return fit.order;
    } catch (const InvalidArgument& e) {
      res.warnings.push_back(std::string(what) + ": " + e.what());
      return std::nullopt;
    }
  };
  t.fitted_order_constraint = try_fit(t.constraint_l1, "constraint_l1");
  t.fitted_order_gap = try_fit(t.state_gap, "state_gap");
}

}  // namespace detail

/// eps -> 0 sweep: the four-species system is integrated once from the
/// aggregated initial data, the five-species system once per eps.
inline SweepResult run_epsilon_sweep(const DimensionalParams& p, std::span<const double> eps_list,
                                     const SystemState& ic, const Grid& g, const StepPolicy& policy,
                                     SweepOptions opt = {}) {
  validate(p);
  detail::check_decreasing(eps_list, "epsilon");
  detail::expect_kind(ic, SystemKind::Micro5, &g);
  if (!(ic[1].min() > 0.0) || !(ic[2].min() > 0.0)) {
    throw InvalidArgument("initial Ms and Mh must be bounded below by a positive constant");
  }
  if (ic.min_value() < 0.0) throw InvalidArgument("initial data must be nonnegative");

  const double p_in = ic[0].max_abs();
  SweepResult res;
  res.table.knob = Knob::Epsilon;

  const SystemState meso_ic = aggregate_top(ic);
  const double dt_ref = stable_dt(p, g, SystemKind::Meso4, policy);
  RunDiagnostics& ref = res.reference;
  ref.dt = dt_ref;
  ref.min_meso = INFINITY;
  std::vector<Observer> ref_obs{{
      [&](double t, const SystemState& s) {
        ref.prey_growth_ratio = std::max(ref.prey_growth_ratio, detail::prey_ratio(s, t, p.r, p_in));
      },
      [&](double, const SystemState& s) { ref.min_meso = std::min({ref.min_meso, s[1].min(), s[2].min()}); },
  }};
  Trajectory reference;
  try {
    reference = integrate([&](const SystemState& s) { return rhs_meso4(s, p, g); }, meso_ic, dt_ref, policy, ref_obs);
  } catch (const Error& e) {
    detail::rethrow_annotated(e, "limit system: ");
  }
  ref.steps = reference.steps;
  ref.retries = reference.retries;

  auto one = [&](double eps) {
    DimensionalParams pe = p;
    pe.epsilon = eps;
    detail::SingleRun run;
    run.diag.value = eps;
    run.diag.dt = stable_dt(pe, g, SystemKind::Micro5, policy);
    run.diag.min_meso = INFINITY;
    detail::TimeQuadrature residual, ts_sq, th_sq;
    std::size_t snap = 0;
    std::vector<Observer> obs{{
        [&](double t, const SystemState& s) {
          run.gap = std::max(run.gap, detail::gap_l2(aggregate_top(s), reference.snapshots.at(snap), g));
          ++snap;
          run.diag.prey_growth_ratio = std::max(run.diag.prey_growth_ratio, detail::prey_ratio(s, t, p.r, p_in));
        },
        [&](double t, const SystemState& s) {
          residual.add(t, constraint_residual_eps(s, pe, g));
          const double a = norm_l2(s[3], g);
          const double b = norm_l2(s[4], g);
          ts_sq.add(t, a * a);
          th_sq.add(t, b * b);
          run.diag.min_meso = std::min({run.diag.min_meso, s[1].min(), s[2].min()});
        },
    }};
    const auto traj =
        integrate([&](const SystemState& s) { return rhs_micro5(s, pe, g); }, ic, run.diag.dt, policy, obs);
    run.constraint_l1 = residual.total();
    run.diag.steps = traj.steps;
    run.diag.retries = traj.retries;
    run.diag.top_search_l2 = std::sqrt(ts_sq.total());
    run.diag.top_handle_l2 = std::sqrt(th_sq.total());
    return run;
  };
  detail::assemble(res, eps_list, detail::run_all(eps_list, opt, one, "epsilon"));
  return res;
}

/// delta -> 0 sweep: the three-species cross-diffusion system once, the
/// four-species system once per delta. Results are reported, not asserted.
inline SweepResult run_delta_sweep(const DimensionalParams& p, std::span<const double> delta_list,
                                   const SystemState& ic, const Grid& g, const StepPolicy& policy,
                                   SweepOptions opt = {}, Meso4Options meso_opt = {}) {
  validate(p);
  detail::check_decreasing(delta_list, "delta");
  detail::expect_kind(ic, SystemKind::Meso4, &g);
  if (!(ic[1].min() > 0.0) || !(ic[2].min() > 0.0)) {
    throw InvalidArgument("initial Ms and Mh must be bounded below by a positive constant");
  }
  if (ic.min_value() < 0.0) throw InvalidArgument("initial data must be nonnegative");

  const double p_in = ic[0].max_abs();
  SweepResult res;
  res.table.knob = Knob::Delta;

  const SystemState macro_ic = aggregate_meso(ic);
  RunDiagnostics& ref = res.reference;
  ref.dt = stable_dt(p, g, SystemKind::Macro3, policy);
  ref.min_meso = INFINITY;
  std::vector<Observer> ref_obs{{
      [&](double t, const SystemState& s) {
        ref.prey_growth_ratio = std::max(ref.prey_growth_ratio, detail::prey_ratio(s, t, p.r, p_in));
      },
      [&](double, const SystemState& s) { ref.min_meso = std::min(ref.min_meso, s[1].min()); },
  }};
  Trajectory reference;
  try {
    reference = integrate([&](const SystemState& s) { return rhs_macro3(s, p, g); }, macro_ic, ref.dt, policy, ref_obs);
  } catch (const Error& e) {
    detail::rethrow_annotated(e, "limit system: ");
  }
  ref.steps = reference.steps;
  ref.retries = reference.retries;

  auto one = [&](double delta) {
    DimensionalParams pd = p;
    pd.delta = delta;
    detail::SingleRun run;
    run.diag.value = delta;
    run.diag.dt = stable_dt(pd, g, SystemKind::Meso4, policy);
    run.diag.min_meso = INFINITY;
    detail::TimeQuadrature residual;
    std::size_t snap = 0;
    std::vector<Observer> obs{{
        [&](double t, const SystemState& s) {
          run.gap = std::max(run.gap, detail::gap_l2(aggregate_meso(s), reference.snapshots.at(snap), g));
          ++snap;
          run.diag.prey_growth_ratio = std::max(run.diag.prey_growth_ratio, detail::prey_ratio(s, t, p.r, p_in));
        },
        [&](double t, const SystemState& s) {
          residual.add(t, constraint_residual_delta(s, pd, g));
          run.diag.min_meso = std::min({run.diag.min_meso, s[1].min(), s[2].min()});
        },
    }};
    const auto traj = integrate([&](const SystemState& s) { return rhs_meso4(s, pd, g, meso_opt); }, ic,
                                run.diag.dt, policy, obs);
    run.constraint_l1 = residual.total();
    run.diag.steps = traj.steps;
    run.diag.retries = traj.retries;
    return run;
  };
  detail::assemble(res, delta_list, detail::run_all(delta_list, opt, one, "delta"));
  return res;
}

}  // namespace fastlim
