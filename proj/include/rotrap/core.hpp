// Domain types and small dense linear algebra shared by every rotrap module.
//
// Internal units are SI with angular frequencies in rad/s. The potential
// matrix holds squared angular frequencies (rad^2/s^2), so a trap with
// linear frequencies (fx, fy, fz) in Hz has V = diag((2 pi f)^2).
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace rotrap {

using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using CVec6 = Eigen::Matrix<Complex, 6, 1>;
using CMat6 = Eigen::Matrix<Complex, 6, 6>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A caller broke an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An eigenbasis could not be formed: a repeated eigenvalue whose
/// eigenspace is deficient, or a spectrum too close to that to trust.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thresholds shared by every operation that branches on "real vs complex",
/// "zero vs nonzero" or "equal vs distinct".
struct Tolerances {
  double symmetry_rel = 1e-12;
  double unit_vector = 1e-12;
  // A chi root is real if |Im chi| <= root_real_rel * max(1, |chi|).
  double root_real_rel = 1e-7;
  // A chi root is negative if Re chi < -root_sign_rel * max(1, |chi|).
  double root_sign_rel = 1e-7;
  double root_rel = 1e-9;
  // Smallest admissible reciprocal condition number of an eigenvector matrix.
  double defective_rcond = 1e-10;
  // Two resonances closer than this (relative) are reported as merged.
  double degenerate_rel = 1e-9;
  // |n . e| >= 1 - principal_axis counts as "along a principal axis".
  double principal_axis = 1e-9;
  // Smallest |eigenvalue| of N(Omega) relative to its norm at a resonance.
  double resonance_rel = 1e-7;
};

const Tolerances& default_tolerances();

/// Cross-product matrix: cross_matrix(w) * r == w.cross(r).
Mat3 cross_matrix(const Vec3& w);

struct SymEigen {
  Vec3 values;   // ascending
  Mat3 vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

/// Eigen-decomposition of a real symmetric 3x3 matrix.
/// Throws ContractViolation when the input is not symmetric.
SymEigen eig_sym3(const Mat3& m, const Tolerances& tol = default_tolerances());

struct ComplexEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;  // columns x_i, unit norm
  Eigen::MatrixXcd left;   // columns y_i with y_i^H x_j = delta_ij
};

/// Eigenvalues with right and biorthogonal left eigenvectors of a 3x3 or 6x6
/// complex matrix. Throws DegenerateSpectrum when the right eigenvectors do
/// not span the space.
ComplexEigen eig_complex(const Eigen::MatrixXcd& m,
                         const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Physical scenario
// ---------------------------------------------------------------------------

/// Symmetric positive-definite matrix of squared angular frequencies.
class TrapPotential {
 public:
  explicit TrapPotential(const Mat3& v);

  static TrapPotential from_squared_frequencies(const Vec3& diagonal);
  static TrapPotential from_frequencies_hz(double fx, double fy, double fz);

  const Mat3& matrix() const { return v_; }
  // Principal values ascending with their axes.
  const SymEigen& principal() const { return principal_; }

  double trace() const { return v_.trace(); }
  double determinant() const;
  // (Tr{V}^2 - Tr{V^2}) / 2, the sum of pairwise products of eigenvalues.
  double pair_sum() const;
  double along(const Vec3& n) const { return n.dot(v_ * n); }
  double squared_along(const Vec3& n) const { return (v_ * n).squaredNorm(); }

 private:
  Mat3 v_;
  SymEigen principal_;
};

class RotationSpec {
 public:
  // `axis` must already be a unit vector; omega is the magnitude in rad/s.
  RotationSpec(const Vec3& axis, double omega);
  // Normalizes `direction` first.
  static RotationSpec from_direction(const Vec3& direction, double omega);

  const Vec3& axis() const { return axis_; }
  double omega() const { return omega_; }
  Vec3 angular_velocity() const { return omega_ * axis_; }
  // Omega_ik = eps_ijk Omega_j
  Mat3 omega_matrix() const { return cross_matrix(angular_velocity()); }
  RotationSpec with_omega(double omega) const { return {axis_, omega}; }

 private:
  Vec3 axis_;
  double omega_;
};

/// Lab-frame gravitational acceleration at t = 0 (m/s^2).
struct GravitySpec {
  Vec3 g_vec = Vec3::Zero();
};

struct GravityComponents {
  Vec3 parallel;       // n (n . g)
  Vec3 perpendicular;  // g - n (n . g)
  CVec3 h;             // g_perp + i (n x g_perp)
};

GravityComponents decompose(const GravitySpec& gravity, const Vec3& axis);

struct PhaseState {
  Vec3 r = Vec3::Zero();  // m
  Vec3 p = Vec3::Zero();  // kg m/s

  Vec6 packed() const;
  static PhaseState unpack(const Vec6& packed);
  bool finite() const { return r.allFinite() && p.allFinite(); }
};

struct TrapConfig {
  TrapConfig(TrapPotential potential, RotationSpec rotation, GravitySpec gravity,
             double mass);

  TrapPotential potential;
  RotationSpec rotation;
  GravitySpec gravity;
  double mass;
};

}  // namespace rotrap
