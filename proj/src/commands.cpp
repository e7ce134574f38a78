#include "rotrap/commands.hpp"

#include "rotrap/analytic.hpp"
#include "rotrap/dynamics.hpp"
#include "rotrap/resonance.hpp"
#include "rotrap/scan.hpp"
#include "rotrap/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace rotrap {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kResidualLimit = 1e-6;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json hz_or_null(const RunConfig& cfg, double omega) {
  const auto hz = to_hz(cfg, omega);
  return hz ? json(*hz) : json(nullptr);
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json cvec_json(const CVec3& v) {
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < 3; ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

fs::path output_path(const RunConfig& cfg, const std::string& file) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir / file;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& file) {
  const fs::path path = output_path(cfg, file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& file) {
  out.flush();
  if (!out) throw IoError("write failed for '" + file + "'");
}

void write_json(const RunConfig& cfg, const std::string& file, const json& doc) {
  std::ofstream out = open_output(cfg, file);
  out << doc.dump(2) << '\n';
  finish(out, file);
}

void write_trajectory_csv(const RunConfig& cfg, const std::string& file, const Trajectory& traj,
                          std::size_t stride) {
  std::ofstream out = open_output(cfg, file);
  out << "t,x,y,z,px,py,pz\n";
  const std::size_t n = traj.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    const PhaseState& s = traj.states[i];
    out << fmt(traj.times[i]);
    for (int k = 0; k < 3; ++k) out << ',' << fmt(s.r(k));
    for (int k = 0; k < 3; ++k) out << ',' << fmt(s.p(k));
    out << '\n';
  }
  finish(out, file);
}

json report_header(const RunConfig& cfg, const char* command) {
  return {{"command", command}, {"config", to_json(cfg)}};
}

double fit_start_time(const RunConfig& cfg, double omega) {
  return omega > 0.0 ? cfg.fit_start_periods * kTwoPi / omega : 0.0;
}

json growth_json(const Trajectory& traj, double fit_start) {
  if (!(traj.drive_omega > 0.0)) {
    return {{"error", "no drive period at omega = 0"}};
  }
  try {
    const GrowthFit fit = growth_rate(traj, {.min_separation = -1.0, .fit_start = fit_start});
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"correlation", fit.correlation},
            {"fit_residual", fit.fit_residual},
            {"peaks", fit.peaks},
            {"fit_start", fit_start}};
  } catch (const InsufficientData& e) {
    return {{"error", e.what()}};
  }
}

double max_radius(const Trajectory& traj) {
  double m = 0.0;
  for (const PhaseState& s : traj.states) m = std::max(m, s.r.norm());
  return m;
}

std::vector<double> sample_times(double duration, double dt) {
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

}  // namespace

ExitCode cmd_stability(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.scan_min || !cfg.scan_max) {
    throw ConfigError("config field 'scan': omega_min and omega_max are required");
  }
  if (!(*cfg.scan_max > *cfg.scan_min) || *cfg.scan_min < 0.0) {
    throw ConfigError("config field 'scan': empty or negative omega range");
  }
  const TrapPotential pot = make_potential(cfg);
  const StabilityScan scan =
      stability_scan(pot, cfg.axis, *cfg.scan_min, *cfg.scan_max, cfg.scan_steps);

  {
    std::ofstream out = open_output(cfg, "stability.csv");
    out << "omega,chi1_re,chi1_im,chi2_re,chi2_im,chi3_re,chi3_im,classification\n";
    for (const ScanRow& row : scan.rows) {
      out << fmt(row.omega);
      for (const Complex& chi : row.chi_roots) out << ',' << fmt(chi.real()) << ',' << fmt(chi.imag());
      out << ',' << to_string(row.classification) << '\n';
    }
    finish(out, "stability.csv");
  }

  json doc = report_header(cfg, "stability");
  json boundaries = json::array();
  for (const ScanBoundary& b : scan.boundaries) {
    boundaries.push_back({{"omega", b.omega},
                          {"omega_hz", hz_or_null(cfg, b.omega)},
                          {"below", to_string(b.below)},
                          {"above", to_string(b.above)}});
  }
  json regions = json::array();
  int windows = 0;
  std::string sequence;
  for (const ScanRegion& r : scan.regions()) {
    regions.push_back({{"omega_begin", r.omega_begin},
                       {"omega_end", r.omega_end},
                       {"classification", to_string(r.classification)}});
    if (r.classification != Stability::Stable) ++windows;
    if (!sequence.empty()) sequence += " -> ";
    sequence += to_string(r.classification);
  }
  const InstabilityBounds ib = lower_instability_bounds(pot, cfg.axis);
  doc["boundaries"] = boundaries;
  doc["regions"] = regions;
  doc["sequence"] = sequence;
  doc["instability_windows"] = windows;
  doc["lower_bounds"] = {{"omega1", ib.omega1}, {"omega2", ib.omega2},
                         {"omega1_hz", hz_or_null(cfg, ib.omega1)},
                         {"omega2_hz", hz_or_null(cfg, ib.omega2)},
                         {"a", ib.a}, {"b", ib.b}, {"c", ib.c}};
  write_json(cfg, "stability.json", doc);

  log << "stability: " << scan.rows.size() << " rows, " << windows
      << " instability window(s): " << sequence << '\n';
  for (const ScanBoundary& b : scan.boundaries) {
    log << "  boundary " << fmt(b.omega) << "  " << to_string(b.below) << " -> "
        << to_string(b.above) << '\n';
  }
  return ExitCode::Ok;
}

ExitCode cmd_resonance(const RunConfig& cfg, std::ostream& log) {
  const TrapPotential pot = make_potential(cfg);
  const ResonanceReport rep = resonant_omegas(pot, cfg.axis);
  const LowerResonanceAudit audit = verify_lower_resonance_stable(pot, cfg.axis);
  const DiscriminantSplit split = discriminant_split(pot, cfg.axis);

  json doc = report_header(cfg, "resonance");
  doc["d"] = rep.d_coef;
  doc["e"] = rep.e_coef;
  doc["f"] = rep.f_coef;
  doc["discriminant"] = rep.discriminant;
  doc["discriminant_terms"] = {split.term1, split.term2};
  doc["omega_minus"] = rep.omega_minus;
  doc["omega_plus"] = rep.omega_plus;
  doc["omega_minus_hz"] = hz_or_null(cfg, rep.omega_minus);
  doc["omega_plus_hz"] = hz_or_null(cfg, rep.omega_plus);
  doc["degenerate"] = rep.degenerate;
  doc["placement_minus"] = to_string(rep.placement_minus);
  doc["placement_plus"] = to_string(rep.placement_plus);
  doc["minus_on_boundary"] = rep.minus_on_boundary;
  doc["plus_on_boundary"] = rep.plus_on_boundary;
  doc["omega1"] = rep.bounds.omega1;
  doc["omega2"] = rep.bounds.omega2;
  doc["omega1_hz"] = hz_or_null(cfg, rep.bounds.omega1);
  doc["omega2_hz"] = hz_or_null(cfg, rep.bounds.omega2);
  doc["lower_resonance_audit"] = {{"margin", audit.margin},
                                  {"critical_at_resonance", audit.critical_at_resonance},
                                  {"slope_resonance", audit.slope_resonance},
                                  {"slope_critical", audit.slope_critical},
                                  {"holds", audit.holds}};
  if (const auto merged = degeneracy_condition(pot)) {
    doc["merge_axis"] = vec_json(merged->axis);
    doc["merge_omega"] = merged->omega;
  } else {
    doc["merge_axis"] = nullptr;
    doc["merge_omega"] = nullptr;
  }
  write_json(cfg, "resonance.json", doc);

  log << "resonance: omega- = " << fmt(rep.omega_minus) << " (" << to_string(rep.placement_minus)
      << "), omega+ = " << fmt(rep.omega_plus) << " (" << to_string(rep.placement_plus) << ")";
  if (const auto hz = to_hz(cfg, rep.omega_minus)) {
    log << "\n  in Hz: " << fmt(*hz) << ", " << fmt(*to_hz(cfg, rep.omega_plus));
  }
  log << (rep.degenerate ? "\n  degenerate: the two resonances coincide\n" : "\n");
  return ExitCode::Ok;
}

ExitCode cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const double omega = requested_omega(cfg);
  const TrapConfig trap = make_trap_config(cfg, omega);
  const PhaseState init = make_initial_state(cfg, trap);
  const double dt = cfg.dt ? *cfg.dt : default_time_step(trap);
  if (cfg.duration < dt) throw ConfigError("config field 'integration.duration': shorter than dt");

  // Integrate at full resolution so the envelope fit sees every peak; the
  // stride only thins the CSV.
  const Trajectory traj = integrate_rk4(trap, init, cfg.duration, dt, 1);
  write_trajectory_csv(cfg, "trajectory.csv", traj, cfg.stride);

  json doc = report_header(cfg, "simulate");
  doc["omega"] = omega;
  doc["omega_hz"] = hz_or_null(cfg, omega);
  doc["integrator"] = traj.integrator;
  doc["dt"] = dt;
  doc["samples"] = traj.states.size();
  doc["overflow"] = traj.overflow;
  doc["stability"] = to_string(mode_spectrum(trap.potential, cfg.axis, omega).classification);
  doc["max_radius"] = max_radius(traj);
  doc["growth"] = growth_json(traj, fit_start_time(cfg, omega));

  const ResonanceReport rep = resonant_omegas(trap.potential, cfg.axis);
  const double nearest =
      std::abs(omega - rep.omega_minus) <= std::abs(omega - rep.omega_plus) ? rep.omega_minus
                                                                            : rep.omega_plus;
  doc["nearest_resonance"] = nearest;
  doc["nearest_resonance_hz"] = hz_or_null(cfg, nearest);
  doc["predicted_growth"] = nullptr;
  if (std::abs(omega - nearest) <= 1e-6 * std::max(1.0, nearest)) {
    try {
      const ResonantSolution sol = resonant_vectors(make_trap_config(cfg, nearest));
      doc["predicted_growth"] = sol.growth_amplitude();
    } catch (const std::exception&) {
      // No resonant drive or degenerate spectrum; nothing to predict.
    }
  }

  if (cfg.compare_modes) {
    try {
      const Trajectory modes = propagate_modes(trap, init, traj.times);
      write_trajectory_csv(cfg, "modes.csv", modes, cfg.stride);
      double err = 0.0;
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        err = std::max(err, (traj.states[i].r - modes.states[i].r).norm());
      }
      doc["modes"] = {{"max_position_difference", err}};
    } catch (const DegenerateSpectrum& e) {
      doc["modes"] = {{"error", e.what()}};
    }
  }
  write_json(cfg, "simulate.json", doc);

  log << "simulate: omega = " << fmt(omega) << ", dt = " << fmt(dt) << ", "
      << traj.states.size() << " samples" << (traj.overflow ? " (overflow)" : "") << '\n';
  if (doc["growth"].contains("slope")) {
    log << "  envelope slope " << fmt(doc["growth"]["slope"].get<double>()) << ", correlation "
        << fmt(doc["growth"]["correlation"].get<double>()) << '\n';
  }
  return ExitCode::Ok;
}

ExitCode cmd_analytic(const RunConfig& cfg, std::ostream& log) {
  const TrapPotential pot = make_potential(cfg);
  const ResonanceReport rep = resonant_omegas(pot, cfg.axis);
  double omega = 0.0;
  double snap_distance = 0.0;
  if (cfg.resonance) {
    omega = *cfg.resonance == ResonanceBranch::Minus ? rep.omega_minus : rep.omega_plus;
  } else if (cfg.omega) {
    omega = *cfg.omega;
    if (cfg.snap_to_resonance) {
      const double target = std::abs(omega - rep.omega_minus) <= std::abs(omega - rep.omega_plus)
                                ? rep.omega_minus
                                : rep.omega_plus;
      snap_distance = target - omega;
      omega = target;
    }
  } else {
    throw ConfigError("config field 'rotation': need omega, omega_hz or resonance");
  }

  const TrapConfig trap = make_trap_config(cfg, omega);
  const ResonantSolution sol = resonant_vectors(trap);
  const ResidualReport res = residual_check(sol, trap);

  const double dt = cfg.dt ? *cfg.dt : default_time_step(trap);
  const std::vector<double> times = sample_times(cfg.duration, dt);
  const Trajectory traj = resonant_trajectory(sol, trap, times);
  write_trajectory_csv(cfg, "analytic.csv", traj, cfg.stride);

  json doc = report_header(cfg, "analytic");
  doc["omega"] = omega;
  doc["omega_hz"] = hz_or_null(cfg, omega);
  doc["snap_distance"] = snap_distance;
  doc["a"] = cvec_json(sol.a_vec);
  doc["b"] = cvec_json(sol.b_vec);
  doc["c"] = vec_json(sol.c_vec);
  doc["growth_amplitude"] = sol.growth_amplitude();
  doc["a_norm"] = sol.a_vec.norm();
  doc["residuals"] = {{"a", res.res_a}, {"b", res.res_b}, {"c", res.res_c}};
  doc["residual_alternative_b"] = res.res_b_alternative;
  doc["residual_limit"] = kResidualLimit;
  doc["dt"] = dt;
  doc["growth"] = growth_json(traj, fit_start_time(cfg, omega));
  write_json(cfg, "analytic.json", doc);

  log << "analytic: omega = " << fmt(omega) << ", growth amplitude " << fmt(sol.growth_amplitude())
      << ", max residual " << fmt(res.max()) << '\n';
  if (!(res.max() <= kResidualLimit)) {
    throw NumericalFailure("residuals exceed " + fmt(kResidualLimit));
  }
  return ExitCode::Ok;
}

ExitCode run_command(std::string_view name, const RunConfig& cfg, std::ostream& log,
                     std::ostream& err) {
  try {
    if (name == "stability") return cmd_stability(cfg, log);
    if (name == "resonance") return cmd_resonance(cfg, log);
    if (name == "simulate") return cmd_simulate(cfg, log);
    if (name == "analytic") return cmd_analytic(cfg, log);
    throw ConfigError("unknown command '" + std::string(name) + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::ConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::IoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::IoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::NumericalFailure;
  }
}

}  // namespace rotrap
