// Command-line front end: one subcommand per pipeline, JSON config in,
// CSV artifacts and manifest.json out.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fastlim/config.hpp"
#include "fastlim/errors.hpp"
#include "fastlim/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 1;

int report(const std::string& category, const std::string& message, int code, const nlohmann::json& extra = {}) {
  nlohmann::json rec{{"error", category}, {"exit_code", code}, {"message", message}};
  if (extra.is_object()) rec.update(extra);
  std::cerr << rec.dump() << '\n';
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fastlim::IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw fastlim::IoError("cannot read config '" + path + "'");
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-reaction limits of a structured predator-prey system"};
  app.set_version_flag("--version", std::string(fastlim::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");

  struct Entry {
    fastlim::Command command;
    const char* help;
  };
  const Entry entries[] = {
      {fastlim::Command::Simulate, "Integrate one model and write final fields and a time series"},
      {fastlim::Command::Equilibria, "Boundary and interior equilibria of the dimensionless system"},
      {fastlim::Command::Dispersion, "Dispersion relation and Turing classification at the interior equilibrium"},
      {fastlim::Command::SweepEps, "Convergence of the five-species system as eps -> 0"},
      {fastlim::Command::SweepDelta, "Convergence of the four-species system as delta -> 0"},
  };
  std::vector<std::pair<CLI::App*, fastlim::Command>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(std::string(fastlim::command_name(e.command)), e.help);
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("-o,--out", out_dir, "Output directory (created if missing)");
    sub->add_flag("-q,--quiet", quiet, "Suppress progress messages");
    subs.emplace_back(sub, e.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report("UsageError", e.what(), kExitConfig);
  }

  fastlim::Command command = fastlim::Command::Simulate;
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) command = c;
  }

  try {
    fastlim::RunSpec spec = fastlim::parse_config(read_file(config_path), command);
    spec.output_dir = out_dir;
    fastlim::ProgressSink progress;
    if (!quiet) progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
    fastlim::run(spec, progress);
    return 0;
  } catch (const fastlim::ParseError& e) {
    return report(e.category(), e.what(), kExitConfig, {{"line", e.line()}, {"offset", e.offset()}});
  } catch (const fastlim::ValidationError& e) {
    return report(e.category(), e.what(), kExitConfig, {{"key", e.key()}});
  } catch (const fastlim::MissingParameter& e) {
    return report(e.category(), e.what(), kExitConfig, {{"key", e.key()}});
  } catch (const fastlim::ConfigError& e) {
    return report(e.category(), e.what(), kExitConfig);
  } catch (const fastlim::InvalidArgument& e) {
    return report(e.category(), e.what(), kExitConfig);
  } catch (const fastlim::NumericalFailure& e) {
    return report(e.category(), e.what(), kExitNumerical);
  } catch (const fastlim::IoError& e) {
    return report(e.category(), e.what(), kExitIo);
  } catch (const std::exception& e) {
    return report("InternalError", e.what(), kExitInternal);
  }
}
