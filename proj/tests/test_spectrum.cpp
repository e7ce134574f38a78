#include "rotrap/dynamics.hpp"
#include "rotrap/spectrum.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace rotrap;

namespace {

const TrapPotential& trap123() {
  static const TrapPotential v = TrapPotential::from_squared_frequencies({1.0, 2.0, 3.0});
  return v;
}

const Vec3 kDiag = Vec3(1.0, 1.0, 1.0).normalized();

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("coefficients for the unit-diagonal trap") {
  const CubicCoefficients q = char_poly_coeffs(trap123(), kDiag, 1.0);
  CHECK(q.a_coef == doctest::Approx(-8.0));
  CHECK(q.b_coef == doctest::Approx(12.0));
  CHECK(q.c_coef == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("no rotation gives the trap eigenvalues") {
  const auto roots = solve_cubic(char_poly_coeffs(trap123(), kDiag, 0.0));
  CHECK(roots[0].real() == doctest::Approx(1.0));
  CHECK(roots[1].real() == doctest::Approx(2.0));
  CHECK(roots[2].real() == doctest::Approx(3.0));
  for (const auto& r : roots) CHECK(r.imag() == 0.0);
}

TEST_CASE("cubic roots against the 6x6 system matrix") {
  // Eigenvalues of M are lambda = +-i sqrt(chi), so chi = -lambda^2.
  for (double omega : {0.3, 1.3, 2.0, 2.8, 3.5}) {
    const TrapConfig cfg(trap123(), RotationSpec(kDiag, omega), GravitySpec{}, 1.0);
    Eigen::EigenSolver<Mat6> es(system_matrix(cfg).m_mat);
    std::vector<Complex> from_matrix;
    for (int k = 0; k < 6; ++k) from_matrix.push_back(-es.eigenvalues()(k) * es.eigenvalues()(k));
    const auto roots = solve_cubic(char_poly_coeffs(trap123(), kDiag, omega));
    for (const Complex& chi : roots) {
      int matches = 0;
      for (const Complex& m : from_matrix) matches += std::abs(m - chi) < 1e-8 * (1.0 + std::abs(chi));
      CHECK_MESSAGE(matches == 2, "omega " << omega << " chi " << chi);
    }
  }
}

TEST_CASE("solve_cubic edge cases") {
  auto from_roots = [](Complex r1, Complex r2, Complex r3) {
    const Complex a = -(r1 + r2 + r3);
    const Complex b = r1 * r2 + r1 * r3 + r2 * r3;
    const Complex c = -r1 * r2 * r3;
    return CubicCoefficients{a.real(), b.real(), c.real()};
  };
  SUBCASE("distinct real") {
    const auto r = solve_cubic(from_roots(-1.0, 2.0, 5.0));
    CHECK(r[0].real() == doctest::Approx(-1.0));
    CHECK(r[2].real() == doctest::Approx(5.0));
  }
  SUBCASE("triple root") {
    // A triple root is only determined to about eps^(1/3).
    const auto r = solve_cubic(from_roots(2.0, 2.0, 2.0));
    for (const auto& x : r) CHECK(std::abs(x - 2.0) < 5e-5);
  }
  SUBCASE("double root") {
    const auto r = solve_cubic(from_roots(1.0, 3.0, 3.0));
    CHECK(std::abs(r[0] - 1.0) < 1e-12);
    CHECK(std::abs(r[1] - 3.0) < 1e-6);
    CHECK(std::abs(r[2] - 3.0) < 1e-6);
  }
  SUBCASE("complex pair is an exact conjugate pair") {
    const auto r = solve_cubic(from_roots(2.0, Complex(1.0, 3.0), Complex(1.0, -3.0)));
    CHECK(r[0] == std::conj(r[1]));
    CHECK(std::abs(r[0] - Complex(1.0, -3.0)) < 1e-12);
    CHECK(r[2].imag() == 0.0);
    CHECK(r[2].real() == doctest::Approx(2.0));
  }
  SUBCASE("widely separated magnitudes") {
    const auto r = solve_cubic(from_roots(1e-8, 1.0, 1e6));
    CHECK(r[0].real() == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(r[2].real() == doctest::Approx(1e6));
  }
}

TEST_CASE("classification across the generic scan") {
  CHECK(mode_spectrum(trap123(), kDiag, 0.5).classification == Stability::Stable);
  CHECK(mode_spectrum(trap123(), kDiag, 1.3).classification == Stability::ExponentialInstability);
  CHECK(mode_spectrum(trap123(), kDiag, 2.0).classification == Stability::Stable);
  CHECK(mode_spectrum(trap123(), kDiag, 2.8).classification == Stability::OscillatoryInstability);
  CHECK(mode_spectrum(trap123(), kDiag, 3.5).classification == Stability::Stable);
  const SpectrumReport rep = mode_spectrum(trap123(), kDiag, 1.3);
  CHECK(rep.negative_real_count == 1);
  CHECK(rep.omega_values[0] == -rep.omega_values[1]);
}

TEST_CASE("lower instability bounds") {
  const InstabilityBounds b = lower_instability_bounds(trap123(), kDiag);
  CHECK(b.a == doctest::Approx(2.0));
  CHECK(b.b == doctest::Approx(22.0 / 3.0));
  CHECK(b.c == doctest::Approx(6.0));
  CHECK(b.omega1 == doctest::Approx(1.11014).epsilon(1e-5));
  CHECK(b.omega2 == doctest::Approx(1.56021).epsilon(1e-5));
  // C vanishes at both ends.
  for (double w : {b.omega1, b.omega2}) {
    CHECK(std::abs(char_poly_coeffs(trap123(), kDiag, w).c_coef) < 1e-12);
  }

  const InstabilityBounds z = lower_instability_bounds(trap123(), Vec3::UnitZ());
  CHECK(z.omega1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(z.omega2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("tilt that closes the exponential window") {
  const TiltCondition tc = degeneracy_tilt(trap123());
  REQUIRE(tc.fully_anisotropic);
  REQUIRE(tc.theta.has_value());
  CHECK(tc.lowest_axis == 0);
  CHECK(tc.highest_axis == 2);
  CHECK(std::sin(*tc.theta) * std::sin(*tc.theta) == doctest::Approx(tc.sin2_theta));
  const InstabilityBounds b = lower_instability_bounds(trap123(), tc.axis);
  CHECK(b.b * b.b - 4.0 * b.a * b.c == doctest::Approx(0.0).epsilon(1e-9).scale(b.b * b.b));
  CHECK(b.omega1 == doctest::Approx(b.omega2).epsilon(1e-6));

  const auto iso = TrapPotential::from_squared_frequencies({1.0, 1.0, 3.0});
  CHECK_FALSE(degeneracy_tilt(iso).fully_anisotropic);
}

TEST_CASE("axis-aligned closed form") {
  for (double omega : {0.4, 1.2, 1.9, 3.0}) {
    const AxisAlignedSpectrum s = axis_aligned_spectrum(trap123(), Vec3::UnitZ(), omega);
    const auto roots = solve_cubic(char_poly_coeffs(trap123(), Vec3::UnitZ(), omega));
    for (int k = 0; k < 3; ++k) {
      CHECK(s.chi_roots[static_cast<std::size_t>(k)] ==
            doctest::Approx(roots[static_cast<std::size_t>(k)].real()).epsilon(1e-9));
    }
    CHECK(s.axis_root == doctest::Approx(3.0));
    CHECK(s.discriminant >= 0.0);
  }
  CHECK_THROWS_AS(axis_aligned_spectrum(trap123(), kDiag, 1.0), ContractViolation);
}

}
