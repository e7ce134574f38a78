// Subcommands of the rotrap tool. Each writes its files into config.out_dir
// and a short summary to `log`.
//
//   stability  stability.csv, stability.json
//   resonance  resonance.json
//   simulate   trajectory.csv, simulate.json, modes.csv if compare_modes
//   analytic   analytic.csv, analytic.json
#pragma once

#include "rotrap/config.hpp"

#include <iosfwd>
#include <string_view>

namespace rotrap {

ExitCode cmd_stability(const RunConfig& config, std::ostream& log);
ExitCode cmd_resonance(const RunConfig& config, std::ostream& log);
ExitCode cmd_simulate(const RunConfig& config, std::ostream& log);
ExitCode cmd_analytic(const RunConfig& config, std::ostream& log);

/// Dispatches by name and turns exceptions into exit codes, printing the
/// diagnostic to `err`.
ExitCode run_command(std::string_view name, const RunConfig& config, std::ostream& log,
                     std::ostream& err);

}  // namespace rotrap
