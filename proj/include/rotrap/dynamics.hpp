// Time-domain evolution in the frame rotating with the trap.
//
// State R = (r, p) obeys
//   dr/dt = p/m - Omega x r
//   dp/dt = -m V r - Omega x p + m g(t)
// with gravity rotating rigidly about the trap axis:
//   g(t) = g_par + g_perp cos(Omega t) - (n x g_perp) sin(Omega t).
#pragma once

#include "rotrap/core.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotrap {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Vec3 gravity_rotating_frame(const GravitySpec& gravity, const RotationSpec& rotation, double t);

/// M(Omega) = [[-Omega, I/m], [-m V, -Omega]] together with the complex drive
/// vectors G_par = m (0, g_par) and G_perp = m (0, h).
struct SystemMatrix {
  Mat6 m_mat;
  CVec6 drive_par;
  CVec6 drive_perp;
};

SystemMatrix system_matrix(const TrapConfig& config);

/// Right-hand side of the real equations of motion.
Vec6 phase_velocity(const TrapConfig& config, const Vec6& state, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::string integrator;
  double dt = 0.0;           // 0 for closed-form samplers
  double drive_omega = 0.0;  // rotation rate of the config that produced it
  bool overflow = false;     // integration stopped on a non-finite state
};

/// (2 pi / omega_max) / 200, omega_max being the largest real mode frequency
/// (or the largest trap frequency when some mode is unstable).
double default_time_step(const TrapConfig& config);

/// Classical fixed-step RK4. Stores every `stride`-th step plus t = 0.
/// Stops early and sets `overflow` if the state stops being finite.
Trajectory integrate_rk4(const TrapConfig& config, const PhaseState& initial, double t_end,
                         double dt, std::size_t stride = 1);

/// (e^{z t} - 1) / z, continued to t at z = 0.
Complex phi(Complex z, double t);

/// Expansion of the complexified motion on the eigenbasis of M(Omega):
///   W(t) = sum_k alpha_k(t) e^{lambda_k t} X_k,  lambda_k = i omega_k.
struct ModeExpansion {
  Eigen::Matrix<Complex, 6, 1> lambdas;
  CMat6 right;  // X_k in columns
  CMat6 left;   // Y_k in columns, Y_i^H X_j = delta_ij
  CVec6 gamma_par;
  CVec6 gamma_perp;
  CVec6 alpha0;
  double drive_omega = 0.0;

  /// Complex W(t); the physical state is its real part.
  CVec6 evaluate(double t) const;
};

ModeExpansion mode_expansion(const TrapConfig& config, const PhaseState& initial,
                             const Tolerances& tol = default_tolerances());

/// Closed-form propagation through the mode expansion. Throws
/// DegenerateSpectrum when M(Omega) lacks a complete eigenbasis; integrate_rk4
/// is the fallback for those configurations.
Trajectory propagate_modes(const TrapConfig& config, const PhaseState& initial,
                           std::span<const double> times,
                           const Tolerances& tol = default_tolerances());

/// H = p^2/2m + r.Omega.p + (m/2) r.V.r - m r.g(t)
double hamiltonian_value(const TrapConfig& config, const PhaseState& state, double t);

struct GrowthFit {
  double slope = 0.0;        // m/s
  double intercept = 0.0;    // m
  double fit_residual = 0.0; // rms deviation of peaks from the line, m
  double correlation = 0.0;
  std::size_t peaks = 0;
};

struct GrowthOptions {
  // Peaks closer than this are merged, keeping the tallest. Negative means
  // half the drive period of the trajectory.
  double min_separation = -1.0;
  // Only peaks at t >= fit_start enter the fit.
  double fit_start = 0.0;
};

/// Local maxima of |r(t)|, at least `min_separation` apart, in time order.
std::vector<std::size_t> envelope_peaks(const Trajectory& trajectory, double min_separation);

/// Least-squares line through the envelope peaks of |r(t)|. Needs at least 20
/// peaks in the fit window; throws InsufficientData otherwise.
GrowthFit growth_rate(const Trajectory& trajectory, const GrowthOptions& options = {});

}  // namespace rotrap
