#include "rotrap/core.hpp"

#include <cmath>
#include <string>

namespace rotrap {

const Tolerances& default_tolerances() {
  static const Tolerances tolerances{};
  return tolerances;
}

Mat3 cross_matrix(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

SymEigen eig_sym3(const Mat3& m, const Tolerances& tol) {
  const double scale = m.norm();
  if (!m.allFinite()) throw ContractViolation("eig_sym3: non-finite input");
  if ((m - m.transpose()).norm() > tol.symmetry_rel * scale) {
    throw ContractViolation("eig_sym3: matrix is not symmetric");
  }
  // Symmetrize so rounding noise in the lower triangle is ignored consistently.
  const Mat3 sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw DegenerateSpectrum("eig_sym3: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexEigen eig_complex(const Eigen::MatrixXcd& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || (m.rows() != 3 && m.rows() != 6)) {
    throw ContractViolation("eig_complex: matrix must be 3x3 or 6x6");
  }
  if (!m.allFinite()) throw ContractViolation("eig_complex: non-finite input");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw DegenerateSpectrum("eig_complex: eigensolver did not converge");
  }

  ComplexEigen out;
  out.values = solver.eigenvalues();
  out.right = solver.eigenvectors();
  for (Eigen::Index k = 0; k < out.right.cols(); ++k) {
    out.right.col(k).normalize();
  }

  // A defective matrix yields (numerically) parallel eigenvectors.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.right);
  const auto& s = svd.singularValues();
  const double rcond = s(s.size() - 1) / s(0);
  if (!(rcond > tol.defective_rcond)) {
    throw DegenerateSpectrum("eig_complex: degenerate spectrum (eigenvector matrix rcond " +
                             std::to_string(rcond) + ")");
  }
  out.left = out.right.inverse().adjoint();
  return out;
}

TrapPotential::TrapPotential(const Mat3& v) : v_(v) {
  principal_ = eig_sym3(v);
  if (!(principal_.values(0) > 0.0)) {
    throw ContractViolation("TrapPotential: matrix is not positive definite");
  }
}

TrapPotential TrapPotential::from_squared_frequencies(const Vec3& diagonal) {
  return TrapPotential(diagonal.asDiagonal().toDenseMatrix());
}

TrapPotential TrapPotential::from_frequencies_hz(double fx, double fy, double fz) {
  const double wx = kTwoPi * fx;
  const double wy = kTwoPi * fy;
  const double wz = kTwoPi * fz;
  return from_squared_frequencies(Vec3(wx * wx, wy * wy, wz * wz));
}

double TrapPotential::determinant() const { return v_.determinant(); }

double TrapPotential::pair_sum() const {
  const double t = v_.trace();
  return 0.5 * (t * t - (v_ * v_).trace());
}

RotationSpec::RotationSpec(const Vec3& axis, double omega) : axis_(axis), omega_(omega) {
  if (!axis.allFinite() ||
      std::abs(axis.norm() - 1.0) > default_tolerances().unit_vector) {
    throw ContractViolation("RotationSpec: axis must be a unit vector");
  }
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw ContractViolation("RotationSpec: omega must be finite and >= 0");
  }
}

RotationSpec RotationSpec::from_direction(const Vec3& direction, double omega) {
  const double len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw ContractViolation("RotationSpec: zero or non-finite axis direction");
  }
  return {direction / len, omega};
}

GravityComponents decompose(const GravitySpec& gravity, const Vec3& axis) {
  GravityComponents out;
  out.parallel = axis * axis.dot(gravity.g_vec);
  out.perpendicular = gravity.g_vec - out.parallel;
  const Vec3 twisted = axis.cross(out.perpendicular);
  out.h = out.perpendicular.cast<Complex>() + Complex(0.0, 1.0) * twisted.cast<Complex>();
  return out;
}

Vec6 PhaseState::packed() const {
  Vec6 out;
  out << r, p;
  return out;
}

PhaseState PhaseState::unpack(const Vec6& packed) {
  return {packed.head<3>(), packed.tail<3>()};
}

TrapConfig::TrapConfig(TrapPotential potential_, RotationSpec rotation_,
                       GravitySpec gravity_, double mass_)
    : potential(std::move(potential_)),
      rotation(std::move(rotation_)),
      gravity(std::move(gravity_)),
      mass(mass_) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ContractViolation("TrapConfig: mass must be positive");
  }
  if (!gravity.g_vec.allFinite()) {
    throw ContractViolation("TrapConfig: gravity must be finite");
  }
}

}  // namespace rotrap
