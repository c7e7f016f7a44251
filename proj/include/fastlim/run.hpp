#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "fastlim/config.hpp"
#include "fastlim/csv.hpp"
#include "fastlim/equilibria.hpp"
#include "fastlim/integrator.hpp"
#include "fastlim/limits.hpp"
#include "fastlim/models.hpp"
#include "fastlim/stability.hpp"

namespace fastlim {

inline constexpr const char* kVersion = "0.1.0";

struct OutputBundle {
  nlohmann::json manifest;
  std::vector<std::string> artifacts;  // file names relative to the output directory
};

using ProgressSink = std::function<void(const std::string&)>;

// ---------------------------------------------------------------------------
// Config echo. The result is itself a valid config document.

namespace detail {

template <class P, std::size_t N>
nlohmann::json params_json(const P& p, const std::array<ParamField<P>, N>& fields) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields) j[std::string(f.key)] = p.*(f.member);
  return j;
}

}  // namespace detail

inline nlohmann::json echo_config(const RunSpec& s) {
  using nlohmann::json;
  json j;
  j["command"] = std::string(command_name(s.command));
  if (uses_dimensionless(s.command)) {
    j["params"] = detail::params_json(std::get<DimensionlessParams>(s.params), kDimensionlessFields);
    if (s.command == Command::Dispersion) {
      if (s.k2max) j["k2max"] = *s.k2max;
      j["samples"] = s.samples;
    }
    return j;
  }
  j["params"] = detail::params_json(std::get<DimensionalParams>(s.params), kDimensionalFields);
  if (s.command == Command::Simulate) j["model"] = std::string(kind_name(s.model));
  j["grid"] = {{"dim", s.grid.dim}, {"cells", s.grid.cells}, {"lengths", s.grid.lengths}};
  switch (s.initial.type) {
    case InitialSpec::Type::Homogeneous:
      j["initial"] = {{"type", "homogeneous"}, {"values", s.initial.values}};
      break;
    case InitialSpec::Type::PerturbedEquilibrium:
      j["initial"] = {{"type", "perturbed_equilibrium"}, {"amplitude", s.initial.amplitude}, {"modes", s.initial.modes}};
      break;
    case InitialSpec::Type::FromFile:
      j["initial"] = {{"type", "from_file"}, {"path", s.initial.path}};
      break;
  }
  j["policy"] = {{"cfl_safety", s.policy.cfl_safety},
                 {"relax_safety", s.policy.relax_safety},
                 {"dt_max", s.policy.dt_max},
                 {"t_end", s.policy.t_end},
                 {"snapshots", s.policy.snapshots}};
  if (s.command == Command::SweepEps) j["eps_list"] = s.eps_list;
  if (s.command == Command::SweepDelta) j["delta_list"] = s.delta_list;
  if (s.command == Command::Simulate || s.command == Command::SweepDelta) {
    j["prey_uptake"] = s.prey_uptake == PreyUptake::SearchingOnly ? "searching_only" : "printed_saturating";
  }
  return j;
}

// ---------------------------------------------------------------------------
// Initial conditions

inline Grid make_grid(const GridSpec& s) { return build_grid(s.dim, s.cells, s.lengths); }

inline double domain_diameter(const Grid& g) {
  double sq = 0.0;
  for (int a = 0; a < g.dim(); ++a) sq += g.length(a) * g.length(a);
  return std::sqrt(sq);
}

/// Interior equilibrium of the macroscopic system in dimensional (P, M, T).
inline std::array<double, 3> dimensional_interior_equilibrium(const DimensionalParams& p, double L) {
  const auto eq = interior_equilibrium(nondimensionalize(p, L));
  const auto sc = density_scales(p);
  return {sc.prey * eq.point.u, sc.meso * eq.point.v, sc.top * eq.point.w};
}

/// Lifts (P, M, T) to `kind` by splitting M and T along the fast constraints
/// gamma Mh = alpha P Ms / (1 + c T) and eta Th = beta M Ts.
inline std::vector<double> split_along_constraints(const DimensionalParams& p, const std::array<double, 3>& pmt,
                                                   SystemKind kind) {
  const auto [P, M, T] = pmt;
  const double ratio_h = p.alpha * P / (p.gamma * (1.0 + p.c * T));
  const double Ms = M / (1.0 + ratio_h);
  const double Mh = M - Ms;
  const double Ts = T * p.eta / (p.eta + p.beta * M);
  const double Th = T - Ts;
  switch (kind) {
    case SystemKind::Micro5: return {P, Ms, Mh, Ts, Th};
    case SystemKind::Meso4: return {P, Ms, Mh, T};
    case SystemKind::Macro3: return {P, M, T};
    default: throw InvalidArgument("no dimensional split for this kind");
  }
}

/// Equilibrium times (1 + a prod_i cos(k_i pi x_i / L_i)) in every species.
inline SystemState perturbed_equilibrium(const DimensionalParams& p, const Grid& g, SystemKind kind, double amplitude,
                                         const std::vector<int>& modes) {
  const auto base = split_along_constraints(p, dimensional_interior_equilibrium(p, domain_diameter(g)), kind);
  const double pi = std::numbers::pi;
  const double kx = modes.at(0) * pi / g.length(0);
  const double ky = g.dim() == 2 ? modes.at(1) * pi / g.length(1) : 0.0;
  const Field shape = sample(g, [&](double x, double y) { return 1.0 + amplitude * std::cos(kx * x) * std::cos(ky * y); });
  std::vector<Field> species;
  for (double b : base) species.push_back(b * shape);
  return {kind, std::move(species)};
}

inline SystemState build_initial(const RunSpec& s, const Grid& g) {
  const auto kind = initial_kind(s);
  const auto& p = std::get<DimensionalParams>(s.params);
  switch (s.initial.type) {
    case InitialSpec::Type::Homogeneous: return SystemState::constant(kind, g, s.initial.values);
    case InitialSpec::Type::PerturbedEquilibrium:
      return perturbed_equilibrium(p, g, kind, s.initial.amplitude, s.initial.modes);
    case InitialSpec::Type::FromFile: return read_state_csv(s.initial.path, g, kind);
  }
  throw InvalidArgument("unknown initial condition type");
}

// ---------------------------------------------------------------------------
// Pipelines

namespace detail {

inline std::string join(const std::filesystem::path& dir, const std::string& name) { return (dir / name).string(); }

inline nlohmann::json point_json(const Point3& x) { return {{"u", x.u}, {"v", x.v}, {"w", x.w}}; }

inline nlohmann::json mat_json(const Mat3& a) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : a) j.push_back(row);
  return j;
}

inline nlohmann::json diag_json(const RunDiagnostics& d) {
  return {{"value", d.value},
          {"dt", d.dt},
          {"steps", d.steps},
          {"retries", d.retries},
          {"min_meso", d.min_meso},
          {"top_search_l2", d.top_search_l2},
          {"top_handle_l2", d.top_handle_l2},
          {"prey_growth_ratio", d.prey_growth_ratio}};
}

inline void run_equilibria(const RunSpec& s, const std::filesystem::path& dir, OutputBundle& out) {
  const auto& p = std::get<DimensionlessParams>(s.params);
  const auto rep = find_equilibria(p);
  const std::string exists = rep.e1_exists_condition ? "true" : "false";
  CsvTable t({"kind", "u", "v", "w", "residual_inf", "exists_condition"});
  auto row = [&](const std::string& kind, const Point3& x) {
    const double res = residual_inf(equilibrium_residual(p, x));
    t.add_row({kind, format_real(x.u), format_real(x.v), format_real(x.w), format_real(res), exists});
    return res;
  };
  nlohmann::json res;
  res["interior_exists_condition"] = rep.e1_exists_condition;
  if (rep.e1) {
    res["E1"] = point_json(*rep.e1);
    res["E1"]["residual_inf"] = row("E1", *rep.e1);
  }
  if (rep.estar) {
    res["Estar"] = point_json(*rep.estar);
    res["Estar"]["residual_inf"] = row("Estar", *rep.estar);
    res["Estar"]["bracket_count"] = rep.bracket_count;
    for (const auto& x : rep.estar_all) {
      if (x.u != rep.estar->u) row("Estar_alt", x);
    }
  }
  t.write(join(dir, "equilibria.csv"));
  out.artifacts.push_back("equilibria.csv");
  out.manifest["results"] = res;
}

inline void run_dispersion(const RunSpec& s, const std::filesystem::path& dir, OutputBundle& out) {
  const auto& p = std::get<DimensionlessParams>(s.params);
  const auto eq = interior_equilibrium(p);
  const auto st = analyze_stability(p, eq.point);
  const auto curve = dispersion_scan(p, eq.point, s.k2max, s.samples);
  CsvTable t({"k2", "Tk", "I2k", "hk", "max_re_lambda"});
  for (std::size_t i = 0; i < curve.k2.size(); ++i) {
    t.add_row(std::vector<double>{curve.k2[i], curve.Tk[i], curve.I2k[i], curve.hk[i], curve.max_re_lambda[i]});
  }
  t.write(join(dir, "dispersion.csv"));
  out.artifacts.push_back("dispersion.csv");

  nlohmann::json ledger = nlohmann::json::array();
  for (const auto& c : sign_ledger(p, eq.point)) {
    ledger.push_back({{"name", c.name}, {"value", c.value}, {"strict", c.strict}, {"passed", c.passed}});
  }
  nlohmann::json res;
  res["classification"] = turing_class_name(curve.classification);
  res["violations"] = curve.violations;
  res["k2max"] = curve.k2max;
  res["candidates"] = curve.candidates;
  res["Estar"] = point_json(eq.point);
  res["jacobian"] = mat_json(st.a);
  res["diffusion_matrix"] = mat_json(st.dmat);
  res["invariants"] = {st.inv0.i1, st.inv0.i2, st.inv0.i3};
  res["rh_stable"] = st.rh_stable;
  res["sign_ledger"] = ledger;
  out.manifest["results"] = res;
}

inline nlohmann::json sweep_json(const SweepResult& r) {
  nlohmann::json res;
  res["fitted_order_constraint"] =
      r.table.fitted_order_constraint ? nlohmann::json(*r.table.fitted_order_constraint) : nlohmann::json(nullptr);
  res["fitted_order_gap"] = r.table.fitted_order_gap ? nlohmann::json(*r.table.fitted_order_gap) : nlohmann::json(nullptr);
  res["runs"] = nlohmann::json::array();
  for (const auto& d : r.runs) res["runs"].push_back(diag_json(d));
  res["reference"] = diag_json(r.reference);
  res["warnings"] = r.warnings;
  return res;
}

inline void write_convergence(const SweepResult& r, const char* knob, const std::filesystem::path& dir,
                              OutputBundle& out) {
  CsvTable t({knob, "constraint_l1", "state_gap"});
  for (std::size_t i = 0; i < r.table.values.size(); ++i) {
    t.add_row(std::vector<double>{r.table.values[i], r.table.constraint_l1[i], r.table.state_gap[i]});
  }
  t.write(join(dir, "convergence.csv"));
  out.artifacts.push_back("convergence.csv");
  out.manifest["results"] = sweep_json(r);
}

inline void run_simulation(const RunSpec& s, const std::filesystem::path& dir, OutputBundle& out,
                           const ProgressSink& progress) {
  const auto& p = std::get<DimensionalParams>(s.params);
  validate(p);
  const Grid g = make_grid(s.grid);
  SystemState ic = build_initial(s, g);
  const double dt = stable_dt(p, g, s.model, s.policy);
  const Meso4Options meso_opt{s.prey_uptake};

  const auto names = species_names(s.model);
  std::vector<std::string> columns{"t"};
  for (const auto& n : names) {
    columns.push_back(std::string(n) + "_min");
    columns.push_back(std::string(n) + "_max");
    columns.push_back(std::string(n) + "_integral");
  }
  CsvTable series(columns);
  const double p_in = ic[0].max_abs();
  double growth = 0.0;
  int reported = -1;
  Observer obs;
  obs.on_snapshot = [&](double t, const SystemState& y) {
    std::vector<double> row{t};
    for (std::size_t k = 0; k < y.species.size(); ++k) {
      row.push_back(y[k].min());
      row.push_back(y[k].max());
      row.push_back(integral(y[k], g));
    }
    series.add_row(row);
    if (p_in > 0.0) growth = std::max(growth, y[0].max_abs() / (std::exp(p.r * t) * p_in));
    const int pct = static_cast<int>(100.0 * t / s.policy.t_end);
    if (progress && pct / 10 != reported / 10) {
      reported = pct;
      progress("simulate: t = " + format_real(t) + " (" + std::to_string(pct) + "%)");
    }
  };

  Trajectory traj;
  switch (s.model) {
    case SystemKind::Micro5:
      traj = integrate([&](const SystemState& y) { return rhs_micro5(y, p, g); }, std::move(ic), dt, s.policy, {obs});
      break;
    case SystemKind::Meso4:
      traj = integrate([&](const SystemState& y) { return rhs_meso4(y, p, g, meso_opt); }, std::move(ic), dt,
                       s.policy, {obs});
      break;
    case SystemKind::Macro3:
      traj = integrate([&](const SystemState& y) { return rhs_macro3(y, p, g); }, std::move(ic), dt, s.policy, {obs});
      break;
    default: throw InvalidArgument("simulate supports micro5, meso4 and macro3");
  }

  write_state_csv(traj.final, g, join(dir, "final_state.csv"));
  out.artifacts.push_back("final_state.csv");
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::string name = "final_" + std::string(names[k]) + ".csv";
    write_field_csv(traj.final[k], g, join(dir, name));
    out.artifacts.push_back(name);
  }
  series.write(join(dir, "timeseries.csv"));
  out.artifacts.push_back("timeseries.csv");

  out.manifest["results"] = {{"dt", dt},
                             {"steps", traj.steps},
                             {"retries", traj.retries},
                             {"t_final", traj.times.back()},
                             {"min_value", traj.final.min_value()},
                             {"prey_growth_ratio", growth}};
}

}  // namespace detail

/// Executes `spec`, writing its artifacts and manifest.json into `spec.output_dir`.
inline OutputBundle run(const RunSpec& spec, const ProgressSink& progress = {}) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir(spec.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }

  OutputBundle out;
  out.manifest["version"] = kVersion;
  out.manifest["command"] = std::string(command_name(spec.command));
  out.manifest["config"] = echo_config(spec);
  if (progress) progress(std::string(command_name(spec.command)) + ": started");

  switch (spec.command) {
    case Command::Equilibria: detail::run_equilibria(spec, dir, out); break;
    case Command::Dispersion: detail::run_dispersion(spec, dir, out); break;
    case Command::Simulate: detail::run_simulation(spec, dir, out, progress); break;
    case Command::SweepEps: {
      const auto& p = std::get<DimensionalParams>(spec.params);
      const Grid g = make_grid(spec.grid);
      const auto r = run_epsilon_sweep(p, spec.eps_list, build_initial(spec, g), g, spec.policy);
      detail::write_convergence(r, "eps", dir, out);
      break;
    }
    case Command::SweepDelta: {
      const auto& p = std::get<DimensionalParams>(spec.params);
      const Grid g = make_grid(spec.grid);
      const auto r = run_delta_sweep(p, spec.delta_list, build_initial(spec, g), g, spec.policy, {},
                                     Meso4Options{spec.prey_uptake});
      detail::write_convergence(r, "delta", dir, out);
      break;
    }
  }

  out.manifest["artifacts"] = out.artifacts;
  out.manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string path = detail::join(dir, "manifest.json");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << out.manifest.dump(2) << '\n';
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
  if (progress) progress(std::string(command_name(spec.command)) + ": wrote " + std::to_string(out.artifacts.size() + 1) + " files");
  return out;
}

}  // namespace fastlim
