// Characteristic polynomial Q(chi) = chi^3 + A chi^2 + B chi + C (chi = omega^2)
// of the rotating-frame dynamics and classification of its roots.
#pragma once

#include "rotrap/core.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace rotrap {

struct CubicCoefficients {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c_coef = 0.0;

  double operator()(double chi) const { return ((chi + a_coef) * chi + b_coef) * chi + c_coef; }
  Complex operator()(Complex chi) const { return ((chi + a_coef) * chi + b_coef) * chi + c_coef; }
};

/// Rotationally invariant coefficients of Q(chi) for rotation rate `omega`
/// about the unit axis `axis`.
CubicCoefficients char_poly_coeffs(const TrapPotential& potential, const Vec3& axis,
                                   double omega);

/// Roots of a monic cubic, sorted by real part then imaginary part. Real roots
/// carry an exactly zero imaginary part and a complex pair is returned as an
/// exact conjugate pair.
std::array<Complex, 3> solve_cubic(const CubicCoefficients& q);

enum class Stability { Stable, ExponentialInstability, OscillatoryInstability };

std::string_view to_string(Stability s);

struct SpectrumReport {
  std::array<Complex, 3> chi_roots;
  // +sqrt(chi_k), -sqrt(chi_k) for k = 1..3
  std::array<Complex, 6> omega_values;
  Stability classification = Stability::Stable;
  int negative_real_count = 0;
  int complex_count = 0;
  // Some root sits within tolerance of zero or of the real axis.
  bool marginal = false;
};

SpectrumReport classify_roots(const std::array<Complex, 3>& chi_roots,
                              const Tolerances& tol = default_tolerances());

SpectrumReport mode_spectrum(const TrapPotential& potential, const Vec3& axis, double omega,
                             const Tolerances& tol = default_tolerances());

/// Zeros Omega_1 <= Omega_2 of C(Omega) bounding the exponential-instability
/// window, with the scalars of the biquadratic -a W^2 + b W - c (W = Omega^2).
struct InstabilityBounds {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double a = 0.0;  // n.V.n
  double b = 0.0;  // Tr{V} n.V.n - n.V^2.n
  double c = 0.0;  // Det{V}
};

InstabilityBounds lower_instability_bounds(const TrapPotential& potential, const Vec3& axis);

/// Axis tilt at which the exponential-instability window closes.
struct TiltCondition {
  bool fully_anisotropic = true;
  // Polar angle from the highest-frequency principal axis, in the plane of
  // the lowest and highest principal axes.
  std::optional<double> theta;
  double sin2_theta = 0.0;
  Vec3 axis = Vec3::Zero();  // unit axis in the input frame (zero if absent)
  int lowest_axis = 0;        // principal-axis indices, input frame, -1 if rotated
  int highest_axis = 2;
};

TiltCondition degeneracy_tilt(const TrapPotential& potential,
                              const Tolerances& tol = default_tolerances());

/// Closed-form roots when the rotation axis is a principal axis of the trap.
struct AxisAlignedSpectrum {
  std::array<double, 3> chi_roots{};  // ascending
  double axis_root = 0.0;             // V along the rotation axis, independent of omega
  double discriminant = 0.0;          // of the quadratic factor, always >= 0
  int principal_index = 0;            // index into potential.principal()
};

AxisAlignedSpectrum axis_aligned_spectrum(const TrapPotential& potential, const Vec3& axis,
                                          double omega,
                                          const Tolerances& tol = default_tolerances());

}  // namespace rotrap
