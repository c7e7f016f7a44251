#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fastlim/errors.hpp"
#include "fastlim/integrator.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

enum class Command { Simulate, Equilibria, Dispersion, SweepEps, SweepDelta };

inline std::string_view command_name(Command c) noexcept {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Equilibria: return "equilibria";
    case Command::Dispersion: return "dispersion";
    case Command::SweepEps: return "sweep-eps";
    case Command::SweepDelta: return "sweep-delta";
  }
  return "";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (auto c : {Command::Simulate, Command::Equilibria, Command::Dispersion, Command::SweepEps, Command::SweepDelta}) {
    if (command_name(c) == s) return c;
  }
  return std::nullopt;
}

/// Dimensionless for equilibria/dispersion, dimensional for everything else.
inline bool uses_dimensionless(Command c) noexcept {
  return c == Command::Equilibria || c == Command::Dispersion;
}

struct GridSpec {
  int dim = 1;
  std::vector<int> cells{64};
  std::vector<double> lengths{1.0};
};

struct InitialSpec {
  enum class Type { Homogeneous, PerturbedEquilibrium, FromFile };
  Type type = Type::Homogeneous;
  std::vector<double> values;  // Homogeneous
  double amplitude = 0.0;      // PerturbedEquilibrium
  std::vector<int> modes;      // PerturbedEquilibrium, one per axis
  std::string path;            // FromFile
};

inline const std::vector<double>& default_knob_list() {
  static const std::vector<double> v{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  return v;
}

struct RunSpec {
  Command command = Command::Equilibria;
  std::variant<DimensionalParams, DimensionlessParams> params;
  SystemKind model = SystemKind::Macro3;  // simulate only
  GridSpec grid;
  InitialSpec initial;
  StepPolicy policy;
  std::vector<double> eps_list = default_knob_list();
  std::vector<double> delta_list = default_knob_list();
  std::optional<double> k2max;
  int samples = 1024;
  PreyUptake prey_uptake = PreyUptake::SearchingOnly;
  std::string output_dir = ".";
};

/// Species kind the initial condition has to describe for this spec.
inline SystemKind initial_kind(const RunSpec& s) {
  switch (s.command) {
    case Command::SweepEps: return SystemKind::Micro5;
    case Command::SweepDelta: return SystemKind::Meso4;
    default: return s.model;
  }
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw MissingParameter(where.empty() ? key : where + "." + key);
  return *it;
}

inline const json& require_object(const json& obj, const std::string& key, const std::string& where = "") {
  const json& v = require(obj, key, where);
  if (!v.is_object()) throw ValidationError(where.empty() ? key : where + "." + key, "expected an object");
  return v;
}

inline double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError(key, "expected a number");
  return v.get<double>();
}

inline int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ValidationError(key, "expected an integer");
  return v.get<int>();
}

inline std::vector<double> as_reals(const json& v, const std::string& key) {
  if (!v.is_array()) throw ValidationError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_real(x, key));
  return out;
}

inline std::vector<int> as_ints(const json& v, const std::string& key) {
  if (!v.is_array()) throw ValidationError(key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(as_int(x, key));
  return out;
}

inline std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ValidationError(key, "expected a string");
  return v.get<std::string>();
}

template <class P, std::size_t N>
P parse_param_block(const json& obj, const std::array<ParamField<P>, N>& fields) {
  for (const auto& [key, _] : obj.items()) {
    const bool known = std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.key == key; });
    if (!known) throw ValidationError("params." + key, "unknown parameter");
  }
  P p{};
  for (const auto& f : fields) {
    const std::string key(f.key);
    const json& v = require(obj, key, "params");
    const double x = as_real(v, "params." + key);
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("params." + key, "must be strictly positive");
    p.*(f.member) = x;
  }
  return p;
}

inline SystemKind parse_model(const std::string& s) {
  for (auto k : {SystemKind::Micro5, SystemKind::Meso4, SystemKind::Macro3}) {
    if (kind_name(k) == s) return k;
  }
  throw ValidationError("model", "expected one of micro5, meso4, macro3");
}

inline GridSpec parse_grid(const json& g) {
  reject_unknown(g, {"dim", "cells", "lengths"}, "grid");
  GridSpec s;
  s.dim = as_int(require(g, "dim", "grid"), "grid.dim");
  s.cells = as_ints(require(g, "cells", "grid"), "grid.cells");
  s.lengths = as_reals(require(g, "lengths", "grid"), "grid.lengths");
  if (s.dim != 1 && s.dim != 2) throw ValidationError("grid.dim", "must be 1 or 2");
  if (s.cells.size() != static_cast<std::size_t>(s.dim)) throw ValidationError("grid.cells", "need one entry per axis");
  if (s.lengths.size() != static_cast<std::size_t>(s.dim)) throw ValidationError("grid.lengths", "need one entry per axis");
  for (int c : s.cells)
    if (c < 3) throw ValidationError("grid.cells", "need at least 3 cells per axis");
  for (double l : s.lengths)
    if (!(l > 0.0)) throw ValidationError("grid.lengths", "must be positive");
  return s;
}

inline InitialSpec parse_initial(const json& j, const GridSpec& grid) {
  InitialSpec s;
  const std::string type = as_string(require(j, "type", "initial"), "initial.type");
  if (type == "homogeneous") {
    reject_unknown(j, {"type", "values"}, "initial");
    s.type = InitialSpec::Type::Homogeneous;
    s.values = as_reals(require(j, "values", "initial"), "initial.values");
    for (double v : s.values)
      if (!(v >= 0.0)) throw ValidationError("initial.values", "must be nonnegative");
  } else if (type == "perturbed_equilibrium") {
    reject_unknown(j, {"type", "amplitude", "modes"}, "initial");
    s.type = InitialSpec::Type::PerturbedEquilibrium;
    s.amplitude = as_real(require(j, "amplitude", "initial"), "initial.amplitude");
    s.modes = as_ints(require(j, "modes", "initial"), "initial.modes");
    if (!(s.amplitude >= 0.0 && s.amplitude < 1.0)) throw ValidationError("initial.amplitude", "must lie in [0,1)");
    if (s.modes.size() != static_cast<std::size_t>(grid.dim)) {
      throw ValidationError("initial.modes", "need one mode number per axis");
    }
    for (int m : s.modes)
      if (m < 0) throw ValidationError("initial.modes", "mode numbers must be nonnegative");
  } else if (type == "from_file") {
    reject_unknown(j, {"type", "path"}, "initial");
    s.type = InitialSpec::Type::FromFile;
    s.path = as_string(require(j, "path", "initial"), "initial.path");
  } else {
    throw ValidationError("initial.type", "expected homogeneous, perturbed_equilibrium or from_file");
  }
  return s;
}

inline StepPolicy parse_policy(const json& j) {
  reject_unknown(j, {"cfl_safety", "relax_safety", "dt_max", "t_end", "snapshots"}, "policy");
  StepPolicy p;
  if (j.contains("cfl_safety")) p.cfl_safety = as_real(j["cfl_safety"], "policy.cfl_safety");
  if (j.contains("relax_safety")) p.relax_safety = as_real(j["relax_safety"], "policy.relax_safety");
  if (j.contains("dt_max")) p.dt_max = as_real(j["dt_max"], "policy.dt_max");
  if (j.contains("t_end")) p.t_end = as_real(j["t_end"], "policy.t_end");
  if (j.contains("snapshots")) p.snapshots = as_int(j["snapshots"], "policy.snapshots");
  try {
    validate(p);
  } catch (const InvalidArgument& e) {
    throw ValidationError("policy", e.what());
  }
  return p;
}

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parses and validates a strict JSON run configuration. `command` comes from
/// the command line; a "command" key in the document, if present, must agree.
inline RunSpec parse_config(std::string_view text, std::optional<Command> command = std::nullopt) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_and_column(text, byte);
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what(),
                     line, col);
  }
  if (!doc.is_object()) throw ValidationError("<root>", "config must be a JSON object");

  RunSpec spec;
  if (doc.contains("command")) {
    const auto c = parse_command(detail::as_string(doc["command"], "command"));
    if (!c) throw ValidationError("command", "unknown command");
    if (command && *command != *c) throw ValidationError("command", "does not match the requested subcommand");
    spec.command = *c;
  } else if (command) {
    spec.command = *command;
  } else {
    throw MissingParameter("command");
  }

  const json& params = detail::require_object(doc, "params");
  if (uses_dimensionless(spec.command)) {
    detail::reject_unknown(doc, {"command", "params", "k2max", "samples"}, "");
    spec.params = detail::parse_param_block(params, kDimensionlessFields);
    if (doc.contains("k2max")) {
      spec.k2max = detail::as_real(doc["k2max"], "k2max");
      if (!(*spec.k2max > 0.0)) throw ValidationError("k2max", "must be positive");
    }
    if (doc.contains("samples")) {
      spec.samples = detail::as_int(doc["samples"], "samples");
      if (spec.samples < 16) throw ValidationError("samples", "must be at least 16");
    }
    if (spec.command == Command::Equilibria && (doc.contains("k2max") || doc.contains("samples"))) {
      throw ValidationError(doc.contains("k2max") ? "k2max" : "samples", "not used by equilibria");
    }
    return spec;
  }

  switch (spec.command) {
    case Command::Simulate:
      detail::reject_unknown(doc, {"command", "params", "model", "grid", "initial", "policy", "prey_uptake"}, "");
      spec.model = detail::parse_model(detail::as_string(detail::require(doc, "model", ""), "model"));
      break;
    case Command::SweepEps:
      detail::reject_unknown(doc, {"command", "params", "grid", "initial", "policy", "eps_list"}, "");
      if (doc.contains("eps_list")) spec.eps_list = detail::as_reals(doc["eps_list"], "eps_list");
      break;
    case Command::SweepDelta:
      detail::reject_unknown(doc, {"command", "params", "grid", "initial", "policy", "delta_list", "prey_uptake"}, "");
      if (doc.contains("delta_list")) spec.delta_list = detail::as_reals(doc["delta_list"], "delta_list");
      break;
    default: break;
  }
  spec.params = detail::parse_param_block(params, kDimensionalFields);
  spec.grid = detail::parse_grid(detail::require_object(doc, "grid"));
  spec.initial = detail::parse_initial(detail::require_object(doc, "initial"), spec.grid);
  if (doc.contains("policy")) spec.policy = detail::parse_policy(detail::require_object(doc, "policy"));
  if (doc.contains("prey_uptake")) {
    const auto s = detail::as_string(doc["prey_uptake"], "prey_uptake");
    if (s == "searching_only") {
      spec.prey_uptake = PreyUptake::SearchingOnly;
    } else if (s == "printed_saturating") {
      spec.prey_uptake = PreyUptake::PrintedSaturating;
    } else {
      throw ValidationError("prey_uptake", "expected searching_only or printed_saturating");
    }
  }

  auto check_list = [](const std::vector<double>& xs, const char* key) {
    if (xs.empty()) throw ValidationError(key, "must not be empty");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0.0)) throw ValidationError(key, "values must be positive");
      if (i > 0 && !(xs[i] < xs[i - 1])) throw ValidationError(key, "values must be strictly decreasing");
    }
  };
  if (spec.command == Command::SweepEps) check_list(spec.eps_list, "eps_list");
  if (spec.command == Command::SweepDelta) check_list(spec.delta_list, "delta_list");

  if (spec.initial.type == InitialSpec::Type::Homogeneous &&
      spec.initial.values.size() != species_count(initial_kind(spec))) {
    throw ValidationError("initial.values", "need " + std::to_string(species_count(initial_kind(spec))) +
                                                " values for " + std::string(kind_name(initial_kind(spec))));
  }
  return spec;
}

}  // namespace fastlim
