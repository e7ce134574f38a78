// Closed-form resonant solution.
//
// At a resonant rotation rate the complexified motion admits
//   r(t) = Re((a t + b) e^{i Omega t} + c)
// where, with N(w) = w^2 - 2 i w Omega_hat - Omega_hat^2 - V and
// h = g_perp + i (n x g_perp),
//   N(Omega) a = 0
//   N(Omega) b = 2 (i Omega + Omega_hat) a - h
//   N(0) c     = -g_par.
// a and b are expanded on the eigenvectors of the Hermitian matrix N(Omega),
// obtained by applying its spectral projectors to a generic vector.
#pragma once

#include "rotrap/core.hpp"
#include "rotrap/dynamics.hpp"

#include <span>
#include <stdexcept>

namespace rotrap {

/// Gravity has no component transverse to the rotation axis, so nothing
/// drives the resonant mode.
class NoResonantDrive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N(omega_eval) for the rotation rate and axis of `rotation`.
CMat3 n_matrix(const TrapPotential& potential, const RotationSpec& rotation, double omega_eval);

struct SpectralData {
  double lambda_zero = 0.0;  // numerically ~0 at resonance
  double lambda_plus = 0.0;  // lambda_plus > lambda_minus
  double lambda_minus = 0.0;
  CMat3 p0;
  CMat3 p_plus;
  CMat3 p_minus;
  CVec3 e0;  // unit norm
  CVec3 e_plus;
  CVec3 e_minus;
  CVec3 generic_vector;  // the vector the projectors were applied to
  bool used_fallback = false;
};

/// Spectral projectors of N(Omega) at a resonant Omega and the eigenvectors
/// they extract from `generic`. Throws ContractViolation off resonance and
/// DegenerateSpectrum when lambda_plus ~ lambda_minus or either is ~0.
SpectralData spectral_data(const TrapPotential& potential, const RotationSpec& rotation,
                           const CVec3& generic, const Tolerances& tol = default_tolerances());

struct ResonantSolution {
  CVec3 a_vec = CVec3::Zero();
  CVec3 b_vec = CVec3::Zero();
  Vec3 c_vec = Vec3::Zero();
  double omega_res = 0.0;

  /// Semi-major axis of the ellipse Re(a e^{i phi}): the rate at which the
  /// peaks of |r(t)| grow.
  double growth_amplitude() const;
  CVec3 complex_position(double t) const;
};

ResonantSolution resonant_vectors(const TrapConfig& config,
                                  const Tolerances& tol = default_tolerances());

/// Relative residuals of the three vector equations. `res_b_alternative` measures
/// b against N(Omega) b = i Omega b + a - h, kept for comparison only.
struct ResidualReport {
  double res_a = 0.0;
  double res_b = 0.0;
  double res_c = 0.0;
  double res_b_alternative = 0.0;

  double max() const { return std::max({res_a, res_b, res_c}); }
};

ResidualReport residual_check(const ResonantSolution& solution, const TrapConfig& config);

/// Samples r(t) and p(t) = m (dr/dt + Omega x r) of the closed form.
Trajectory resonant_trajectory(const ResonantSolution& solution, const TrapConfig& config,
                               std::span<const double> times);

/// Closed-form N(Omega) eigenvalue expressions compared with the numerical ones.
struct EigenvalueFormulaCheck {
  double trace_error = 0.0;        // (lambda_+ + lambda_-) vs 5 Omega^2 - Tr V
  double linear_coef_error = 0.0;  // 4 (Omega^4 - 3 Omega^2 Tr V + pair sum) vs lambda_+ lambda_-
  double lambda_plus_error = 0.0;  // closed-form lambda_+ vs numerical
  double lambda_minus_error = 0.0;
};

EigenvalueFormulaCheck eigenvalue_formula_check(const TrapPotential& potential,
                                              const RotationSpec& rotation);

}  // namespace rotrap
