// rotrap: stability maps, resonances and trajectories of a particle in a
// rotating anisotropic harmonic trap.
//
//   rotrap stability --preset fig1 --out out/fig1
//   rotrap simulate --config my.json --omega-hz 6.5
//   rotrap run --preset fig8            (uses the preset's own command)

#include "rotrap/commands.hpp"
#include "rotrap/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct Options {
  std::string config_file;
  std::string preset;
  std::string out_dir;
  bool dimensionless = false;
  std::optional<double> omega;
  std::optional<double> omega_hz;
  std::string resonance;
  bool snap = false;
  std::optional<double> duration;
  std::optional<double> dt;
  std::optional<int> steps;
  std::optional<std::size_t> stride;
  bool compare_modes = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_file, "JSON run configuration");
  sub->add_option("-p,--preset", o.preset, "figure preset name, e.g. fig8");
  sub->add_option("-o,--out", o.out_dir, "output directory");
  sub->add_flag("--dimensionless", o.dimensionless, "trap and rotation values are dimensionless");
  sub->add_option("--omega", o.omega, "rotation rate in internal units (rad/s or dimensionless)");
  sub->add_option("--omega-hz", o.omega_hz, "rotation rate in Hz");
  sub->add_option("--resonance", o.resonance, "rotate at a resonance: minus or plus")
      ->check(CLI::IsMember({"minus", "plus"}));
  sub->add_flag("--snap", o.snap, "snap omega to the nearest resonance (analytic)");
  sub->add_option("--duration", o.duration, "integration time");
  sub->add_option("--dt", o.dt, "time step");
  sub->add_option("--steps", o.steps, "scan grid points");
  sub->add_option("--stride", o.stride, "write every n-th sample");
  sub->add_flag("--compare-modes", o.compare_modes, "also propagate through the mode expansion");
}

json build_document(const Options& o) {
  if (o.preset.empty() && o.config_file.empty()) {
    throw rotrap::ConfigError("give --config or --preset");
  }
  json doc = o.preset.empty() ? json::object() : rotrap::load_preset(o.preset);
  if (!o.config_file.empty()) doc.merge_patch(rotrap::load_json_file(o.config_file));
  doc.erase("description");

  if (o.dimensionless) doc["units"] = "dimensionless";
  if (o.omega || o.omega_hz || !o.resonance.empty()) {
    json& rot = doc["rotation"];
    rot.erase("omega");
    rot.erase("omega_hz");
    rot.erase("resonance");
    if (o.omega) rot["omega"] = *o.omega;
    if (o.omega_hz) rot["omega_hz"] = *o.omega_hz;
    if (!o.resonance.empty()) rot["resonance"] = o.resonance;
  }
  if (o.snap) doc["rotation"]["snap"] = true;
  if (o.duration) doc["integration"]["duration"] = *o.duration;
  if (o.dt) doc["integration"]["dt"] = *o.dt;
  if (o.stride) doc["integration"]["stride"] = *o.stride;
  if (o.compare_modes) doc["integration"]["compare_modes"] = true;
  if (o.steps) doc["scan"]["steps"] = *o.steps;
  if (!o.out_dir.empty()) doc["output"]["dir"] = o.out_dir;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating anisotropic harmonic trap: stability, resonances, trajectories"};
  app.require_subcommand(1);

  Options opts;
  for (const char* name : {"stability", "resonance", "simulate", "analytic", "run"}) {
    add_common(app.add_subcommand(name), opts);
  }
  app.get_subcommand("run")->description("run the command named in the config or preset");

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  rotrap::RunConfig config;
  try {
    config = rotrap::parse_run_config(build_document(opts));
  } catch (const rotrap::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(rotrap::ExitCode::ConfigError);
  } catch (const rotrap::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(rotrap::ExitCode::IoError);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(rotrap::ExitCode::ConfigError);
  }

  if (command == "run") {
    if (config.command.empty()) {
      std::cerr << "error: config names no command; use a subcommand\n";
      return static_cast<int>(rotrap::ExitCode::ConfigError);
    }
    command = config.command;
  }
  return static_cast<int>(rotrap::run_command(command, config, std::cout, std::cerr));
}
