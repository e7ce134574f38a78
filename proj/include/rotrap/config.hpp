// Run configuration for the rotrap command-line tool.
//
// A run is described by one JSON document. Figure presets ship as JSON files
// in presets/; a user config is merged over a preset, and command-line flags
// are merged over both. All values are normalized to internal units on load
// (rad/s and rad^2/s^2, or plain numbers in dimensionless mode).
#pragma once

#include "rotrap/core.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace rotrap {

enum class ExitCode : int { Ok = 0, ConfigError = 2, NumericalFailure = 3, IoError = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Units { Hz, Dimensionless };
enum class ResonanceBranch { Minus, Plus };

struct RunConfig {
  std::string name;
  std::string command;  // preferred subcommand, informational
  Units units = Units::Hz;

  Mat3 potential = Mat3::Identity();
  Vec3 axis = Vec3::UnitZ();
  std::optional<double> omega;
  std::optional<ResonanceBranch> resonance;
  bool snap_to_resonance = false;

  std::optional<double> scan_min;
  std::optional<double> scan_max;
  int scan_steps = 601;

  double mass = 1.0;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  Vec3 initial_position = Vec3::Zero();
  Vec3 initial_velocity = Vec3::Zero();  // rotating-frame dr/dt
  std::optional<Vec3> initial_momentum;  // overrides velocity when present

  std::optional<double> dt;
  double duration = 10.0;
  std::size_t stride = 1;
  bool compare_modes = false;
  double fit_start_periods = 20.0;

  std::string out_dir = ".";
};

/// Directory searched for figN.json presets: $ROTRAP_PRESET_DIR if set,
/// otherwise the presets/ directory of the source tree.
std::string preset_directory();

nlohmann::json load_json_file(const std::string& path);
nlohmann::json load_preset(const std::string& name);

/// Validates and normalizes. Unknown keys and malformed values raise
/// ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc);

/// Resolved configuration in internal units, embedded in every report.
nlohmann::json to_json(const RunConfig& config);

TrapPotential make_potential(const RunConfig& config);
TrapConfig make_trap_config(const RunConfig& config, double omega);
PhaseState make_initial_state(const RunConfig& config, const TrapConfig& trap);

/// Rotation rate requested by the config: the selected resonance branch if
/// one is named, otherwise the explicit omega. ConfigError if neither.
double requested_omega(const RunConfig& config);

/// rad/s to Hz for reports; nullopt in dimensionless mode.
std::optional<double> to_hz(const RunConfig& config, double omega);

}  // namespace rotrap
