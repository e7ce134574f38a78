#include "rotrap/dynamics.hpp"

#include "rotrap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rotrap {

Vec3 gravity_rotating_frame(const GravitySpec& gravity, const RotationSpec& rotation, double t) {
  const GravityComponents gc = decompose(gravity, rotation.axis());
  const double phase = rotation.omega() * t;
  return gc.parallel + gc.perpendicular * std::cos(phase) -
         rotation.axis().cross(gc.perpendicular) * std::sin(phase);
}

SystemMatrix system_matrix(const TrapConfig& config) {
  const Mat3 w = config.rotation.omega_matrix();
  const double m = config.mass;
  SystemMatrix out;
  out.m_mat.topLeftCorner<3, 3>() = -w;
  out.m_mat.topRightCorner<3, 3>() = Mat3::Identity() / m;
  out.m_mat.bottomLeftCorner<3, 3>() = -m * config.potential.matrix();
  out.m_mat.bottomRightCorner<3, 3>() = -w;

  const GravityComponents gc = decompose(config.gravity, config.rotation.axis());
  out.drive_par.setZero();
  out.drive_perp.setZero();
  out.drive_par.tail<3>() = (m * gc.parallel).cast<Complex>();
  out.drive_perp.tail<3>() = m * gc.h;
  return out;
}

Vec6 phase_velocity(const TrapConfig& config, const Vec6& state, double t) {
  const Vec3 r = state.head<3>();
  const Vec3 p = state.tail<3>();
  const Vec3 w = config.rotation.angular_velocity();
  const double m = config.mass;
  Vec6 out;
  out.head<3>() = p / m - w.cross(r);
  out.tail<3>() = -m * (config.potential.matrix() * r) - w.cross(p) +
                  m * gravity_rotating_frame(config.gravity, config.rotation, t);
  return out;
}

double default_time_step(const TrapConfig& config) {
  const SpectrumReport rep =
      mode_spectrum(config.potential, config.rotation.axis(), config.rotation.omega());
  double omega_max = 0.0;
  if (rep.classification == Stability::Stable) {
    for (const Complex& chi : rep.chi_roots) omega_max = std::max(omega_max, std::sqrt(std::max(0.0, chi.real())));
  } else {
    omega_max = std::sqrt(config.potential.principal().values(2));
  }
  omega_max = std::max(omega_max, config.rotation.omega());
  return kTwoPi / omega_max / 200.0;
}

Trajectory integrate_rk4(const TrapConfig& config, const PhaseState& initial, double t_end,
                         double dt, std::size_t stride) {
  if (!(dt > 0.0) || !(t_end >= dt)) {
    throw ContractViolation("integrate_rk4: need dt > 0 and t_end >= dt");
  }
  if (stride == 0) throw ContractViolation("integrate_rk4: stride must be >= 1");

  Trajectory traj;
  traj.integrator = "rk4";
  traj.dt = dt;
  traj.drive_omega = config.rotation.omega();

  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  traj.times.reserve(steps / stride + 2);
  traj.states.reserve(steps / stride + 2);

  Vec6 y = initial.packed();
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Vec6 k1 = phase_velocity(config, y, t);
    const Vec6 k2 = phase_velocity(config, y + 0.5 * dt * k1, t + 0.5 * dt);
    const Vec6 k3 = phase_velocity(config, y + 0.5 * dt * k2, t + 0.5 * dt);
    const Vec6 k4 = phase_velocity(config, y + dt * k3, t + dt);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      traj.overflow = true;
      break;
    }
    if ((i + 1) % stride == 0 || i + 1 == steps) {
      traj.times.push_back(static_cast<double>(i + 1) * dt);
      traj.states.push_back(PhaseState::unpack(y));
    }
  }
  return traj;
}

Complex phi(Complex z, double t) {
  const Complex zt = z * t;
  if (std::abs(zt) < 1e-6) return t * (1.0 + zt / 2.0 + zt * zt / 6.0);
  return (std::exp(zt) - 1.0) / z;
}

ModeExpansion mode_expansion(const TrapConfig& config, const PhaseState& initial,
                             const Tolerances& tol) {
  const SystemMatrix sys = system_matrix(config);
  const ComplexEigen eig = eig_complex(sys.m_mat.cast<Complex>(), tol);

  ModeExpansion out;
  out.lambdas = eig.values;
  out.right = eig.right;
  out.left = eig.left;
  out.drive_omega = config.rotation.omega();
  const CVec6 r0 = initial.packed().cast<Complex>();
  out.alpha0 = out.left.adjoint() * r0;
  out.gamma_par = out.left.adjoint() * sys.drive_par;
  out.gamma_perp = out.left.adjoint() * sys.drive_perp;
  return out;
}

CVec6 ModeExpansion::evaluate(double t) const {
  const Complex i_omega(0.0, drive_omega);
  CVec6 w = CVec6::Zero();
  for (int k = 0; k < 6; ++k) {
    const Complex lam = lambdas(k);
    const Complex amplitude =
        alpha0(k) + gamma_par(k) * phi(-lam, t) + gamma_perp(k) * phi(i_omega - lam, t);
    w += amplitude * std::exp(lam * t) * right.col(k);
  }
  return w;
}

Trajectory propagate_modes(const TrapConfig& config, const PhaseState& initial,
                           std::span<const double> times, const Tolerances& tol) {
  const ModeExpansion modes = mode_expansion(config, initial, tol);
  Trajectory traj;
  traj.integrator = "modes";
  traj.drive_omega = config.rotation.omega();
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  for (double t : times) {
    traj.states.push_back(PhaseState::unpack(modes.evaluate(t).real()));
  }
  return traj;
}

double hamiltonian_value(const TrapConfig& config, const PhaseState& state, double t) {
  const double m = config.mass;
  const Vec3 g = gravity_rotating_frame(config.gravity, config.rotation, t);
  return state.p.squaredNorm() / (2.0 * m) +
         state.r.dot(config.rotation.angular_velocity().cross(state.p)) +
         0.5 * m * state.r.dot(config.potential.matrix() * state.r) - m * state.r.dot(g);
}

std::vector<std::size_t> envelope_peaks(const Trajectory& trajectory, double min_separation) {
  const auto& states = trajectory.states;
  const auto& times = trajectory.times;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < states.size(); ++i) {
    const double here = states[i].r.norm();
    if (here > states[i - 1].r.norm() && here >= states[i + 1].r.norm()) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return states[a].r.norm() > states[b].r.norm();
  });

  std::set<double> kept_times;
  std::vector<std::size_t> kept;
  for (std::size_t idx : candidates) {
    const double t = times[idx];
    auto it = kept_times.lower_bound(t - min_separation);
    if (it != kept_times.end() && *it < t + min_separation) continue;
    kept_times.insert(t);
    kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

GrowthFit growth_rate(const Trajectory& trajectory, const GrowthOptions& options) {
  double separation = options.min_separation;
  if (separation < 0.0) {
    if (!(trajectory.drive_omega > 0.0)) {
      throw ContractViolation("growth_rate: no drive period; pass min_separation explicitly");
    }
    separation = 0.5 * kTwoPi / trajectory.drive_omega;
  }

  std::vector<double> ts;
  std::vector<double> amps;
  for (std::size_t idx : envelope_peaks(trajectory, separation)) {
    if (trajectory.times[idx] < options.fit_start) continue;
    ts.push_back(trajectory.times[idx]);
    amps.push_back(trajectory.states[idx].r.norm());
  }
  if (ts.size() < 20) {
    throw InsufficientData("growth_rate: found " + std::to_string(ts.size()) +
                           " envelope peaks, need at least 20");
  }

  const double n = static_cast<double>(ts.size());
  const double mean_t = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double mean_a = std::accumulate(amps.begin(), amps.end(), 0.0) / n;
  double stt = 0.0;
  double saa = 0.0;
  double sta = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mean_t) * (ts[i] - mean_t);
    saa += (amps[i] - mean_a) * (amps[i] - mean_a);
    sta += (ts[i] - mean_t) * (amps[i] - mean_a);
  }

  GrowthFit fit;
  fit.peaks = ts.size();
  fit.slope = sta / stt;
  fit.intercept = mean_a - fit.slope * mean_t;
  fit.correlation = saa > 0.0 ? sta / std::sqrt(stt * saa) : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = amps[i] - (fit.intercept + fit.slope * ts[i]);
    ss += d * d;
  }
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace rotrap
