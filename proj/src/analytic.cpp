#include "rotrap/analytic.hpp"

#include <cmath>
#include <limits>

namespace rotrap {
namespace {

constexpr Complex kI(0.0, 1.0);

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Closed-form solution of N(0) c = -g_par, evaluated in the principal frame.
Vec3 static_offset(const TrapPotential& potential, const Vec3& axis, double omega,
                   const Vec3& gravity) {
  const SymEigen& pf = potential.principal();
  const Vec3 n = pf.vectors.transpose() * axis;
  const double vx = pf.values(0);
  const double vy = pf.values(1);
  const double vz = pf.values(2);
  const double w2 = omega * omega;
  const double ng = axis.dot(gravity);
  const double nx2 = n.x() * n.x();
  const double ny2 = n.y() * n.y();
  const double nz2 = n.z() * n.z();

  const double den = vx * vy * vz -
                     w2 * (nx2 * vx * (vy + vz) + ny2 * vy * (vz + vx) + nz2 * vz * (vx + vy)) +
                     w2 * w2 * (nx2 * vx + ny2 * vy + nz2 * vz);
  if (std::abs(den) <= 1e-13 * vx * vy * vz) {
    throw ContractViolation("static offset undefined: rotation rate sits on an instability boundary");
  }
  const Vec3 numer(n.x() * (vy - w2) * (vz - w2), n.y() * (vz - w2) * (vx - w2),
                   n.z() * (vx - w2) * (vy - w2));
  return pf.vectors * (ng * numer / den);
}

}  // namespace

CMat3 n_matrix(const TrapPotential& potential, const RotationSpec& rotation, double omega_eval) {
  const CMat3 w = rotation.omega_matrix().cast<Complex>();
  const double w2 = omega_eval * omega_eval;
  return w2 * CMat3::Identity() - 2.0 * kI * omega_eval * w - w * w -
         potential.matrix().cast<Complex>();
}

SpectralData spectral_data(const TrapPotential& potential, const RotationSpec& rotation,
                           const CVec3& generic, const Tolerances& tol) {
  if (!(generic.norm() > 0.0)) throw ContractViolation("spectral_data: zero generic vector");
  const CMat3 n = n_matrix(potential, rotation, rotation.omega());
  Eigen::SelfAdjointEigenSolver<CMat3> solver(n);
  const Vec3 ev = solver.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();

  int zero = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(ev(k)) < std::abs(ev(zero))) zero = k;
  }
  if (std::abs(ev(zero)) > tol.resonance_rel * scale) {
    throw ContractViolation("spectral_data: rotation rate is not resonant (N(Omega) is regular)");
  }

  SpectralData out;
  out.lambda_zero = ev(zero);
  const double l1 = ev((zero + 1) % 3);
  const double l2 = ev((zero + 2) % 3);
  out.lambda_plus = std::max(l1, l2);
  out.lambda_minus = std::min(l1, l2);
  if (out.lambda_plus - out.lambda_minus <= tol.root_rel * scale ||
      std::abs(out.lambda_plus) <= tol.resonance_rel * scale ||
      std::abs(out.lambda_minus) <= tol.resonance_rel * scale) {
    throw DegenerateSpectrum("spectral_data: N(Omega) has a repeated eigenvalue");
  }

  const CMat3 id = CMat3::Identity();
  const double lp = out.lambda_plus;
  const double lm = out.lambda_minus;
  out.p0 = (n - lp * id) * (n - lm * id) / (lp * lm);
  out.p_plus = n * (n - lm * id) / (lp * (lp - lm));
  out.p_minus = n * (n - lp * id) / (lm * (lm - lp));

  auto project = [&](const CVec3& v) {
    out.generic_vector = v;
    out.e0 = out.p0 * v;
    out.e_plus = out.p_plus * v;
    out.e_minus = out.p_minus * v;
    const double floor = 1e-10 * v.norm();
    return out.e0.norm() >= floor && out.e_plus.norm() >= floor && out.e_minus.norm() >= floor;
  };
  if (!project(generic)) {
    out.used_fallback = true;
    const CVec3 nudge(Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(1.0, -1.0));
    if (!project(generic + 1e-3 * generic.norm() * nudge)) {
      throw DegenerateSpectrum("spectral_data: generic vector lies in an eigenspace");
    }
  }

  out.e0.normalize();
  out.e_plus -= out.e0.dot(out.e_plus) * out.e0;
  out.e_plus.normalize();
  out.e_minus -= out.e0.dot(out.e_minus) * out.e0 + out.e_plus.dot(out.e_minus) * out.e_plus;
  out.e_minus.normalize();
  return out;
}

double ResonantSolution::growth_amplitude() const {
  const double norm2 = a_vec.squaredNorm();
  const double pseudo = std::abs(a_vec.cwiseProduct(a_vec).sum());
  return std::sqrt(0.5 * (norm2 + pseudo));
}

CVec3 ResonantSolution::complex_position(double t) const {
  return (a_vec * t + b_vec) * std::exp(kI * omega_res * t) + c_vec.cast<Complex>();
}

ResonantSolution resonant_vectors(const TrapConfig& config, const Tolerances& tol) {
  const RotationSpec& rot = config.rotation;
  const GravityComponents gc = decompose(config.gravity, rot.axis());
  const double g = config.gravity.g_vec.norm();
  if (!(gc.perpendicular.norm() > 1e-12 * g) || g == 0.0) {
    throw NoResonantDrive("no resonant drive: gravity is parallel to the rotation axis");
  }

  const CVec3& h = gc.h;
  const SpectralData sd = spectral_data(config.potential, rot, h, tol);
  const double omega = rot.omega();
  const CMat3 w = rot.omega_matrix().cast<Complex>();
  const CMat3 k = kI * omega * CMat3::Identity() + w;

  // dot() conjugates its left operand: x.dot(y) == x^H y.
  const Complex h0 = sd.e0.dot(h);
  if (std::abs(h0) <= 1e-12 * h.norm()) {
    throw NoResonantDrive("no resonant drive: transverse gravity is orthogonal to the resonant mode");
  }
  const Complex den = sd.e0.dot(k * sd.e0);

  ResonantSolution sol;
  sol.omega_res = omega;
  sol.a_vec = (h0 / (2.0 * den)) * sd.e0;

  auto coefficient = [&](const CVec3& e, double lambda) {
    const double ee = e.squaredNorm();
    return (h0 * e.dot(w * sd.e0) / (den * ee) - e.dot(h) / ee) / lambda;
  };
  sol.b_vec = coefficient(sd.e_plus, sd.lambda_plus) * sd.e_plus +
              coefficient(sd.e_minus, sd.lambda_minus) * sd.e_minus;
  sol.c_vec = static_offset(config.potential, rot.axis(), omega, config.gravity.g_vec);
  return sol;
}

ResidualReport residual_check(const ResonantSolution& solution, const TrapConfig& config) {
  const RotationSpec rot = config.rotation.with_omega(solution.omega_res);
  const GravityComponents gc = decompose(config.gravity, rot.axis());
  const double omega = solution.omega_res;
  const CMat3 n = n_matrix(config.potential, rot, omega);
  const CMat3 n0 = n_matrix(config.potential, rot, 0.0);
  const CMat3 k = kI * omega * CMat3::Identity() + rot.omega_matrix().cast<Complex>();
  const CVec3& a = solution.a_vec;
  const CVec3& b = solution.b_vec;
  const CVec3 c = solution.c_vec.cast<Complex>();
  const CVec3 g_par = gc.parallel.cast<Complex>();

  ResidualReport rep;
  rep.res_a = safe_ratio((n * a).norm(), n.norm() * a.norm());
  const CVec3 rhs_b = 2.0 * k * a - gc.h;
  rep.res_b = safe_ratio((n * b - rhs_b).norm(), n.norm() * b.norm() + rhs_b.norm());
  rep.res_c = safe_ratio((n0 * c + g_par).norm(), n0.norm() * c.norm() + g_par.norm());
  const CVec3 rhs_alternative = kI * omega * b + a - gc.h;
  rep.res_b_alternative =
      safe_ratio((n * b - rhs_alternative).norm(), n.norm() * b.norm() + rhs_alternative.norm());
  return rep;
}

Trajectory resonant_trajectory(const ResonantSolution& solution, const TrapConfig& config,
                               std::span<const double> times) {
  const Vec3 w = config.rotation.axis() * solution.omega_res;
  Trajectory traj;
  traj.integrator = "analytic";
  traj.drive_omega = solution.omega_res;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  for (double t : times) {
    const Complex phase = std::exp(kI * solution.omega_res * t);
    const CVec3 lin = solution.a_vec * t + solution.b_vec;
    const Vec3 r = (lin * phase).real() + solution.c_vec;
    const Vec3 v = ((solution.a_vec + kI * solution.omega_res * lin) * phase).real();
    traj.states.push_back({r, config.mass * (v + w.cross(r))});
  }
  return traj;
}

EigenvalueFormulaCheck eigenvalue_formula_check(const TrapPotential& potential,
                                              const RotationSpec& rotation) {
  const CMat3 n = n_matrix(potential, rotation, rotation.omega());
  Eigen::SelfAdjointEigenSolver<CMat3> solver(n, Eigen::EigenvaluesOnly);
  Vec3 ev = solver.eigenvalues();
  int zero = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(ev(k)) < std::abs(ev(zero))) zero = k;
  }
  const double lp = std::max(ev((zero + 1) % 3), ev((zero + 2) % 3));
  const double lm = std::min(ev((zero + 1) % 3), ev((zero + 2) % 3));

  const SymEigen& pf = potential.principal();
  const Vec3 v = pf.values;
  const Vec3 nn = (pf.vectors.transpose() * rotation.axis()).cwiseAbs2();
  const double w2 = rotation.omega() * rotation.omega();
  const double tr = v.sum();
  const double pairs = v(1) * v(2) + v(0) * v(2) + v(0) * v(1);

  EigenvalueFormulaCheck out;
  const double mag = std::max({std::abs(lp), std::abs(lm), 1e-300});
  out.trace_error = std::abs((lp + lm) - (5.0 * w2 - tr)) / mag;
  out.linear_coef_error =
      std::abs(lp * lm - 4.0 * (w2 * w2 - 3.0 * w2 * tr + pairs)) / (mag * mag);
  double tilt = 0.0;
  for (int i = 0; i < 3; ++i) tilt += v(i) * (1.0 + 2.0 * nn(i));
  const double radicand = 9.0 * w2 * w2 + 2.0 * w2 * tilt + v.squaredNorm() - 2.0 * pairs;
  const double root = radicand >= 0.0 ? std::sqrt(radicand) : std::numeric_limits<double>::quiet_NaN();
  out.lambda_plus_error = std::abs(0.5 * (5.0 * w2 - tr) + 0.5 * root - lp) / mag;
  out.lambda_minus_error = std::abs(0.5 * (5.0 * w2 - tr) - 0.5 * root - lm) / mag;
  return out;
}

}  // namespace rotrap
