// Randomized invariants. Each case draws from a fixed seed so failures replay.
#include "rotrap/analytic.hpp"
#include "rotrap/dynamics.hpp"
#include "rotrap/resonance.hpp"
#include "rotrap/spectrum.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace rotrap;
using namespace testsupport;

TEST_SUITE("properties") {

TEST_CASE("complex roots come in conjugate pairs") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> w(0.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const TrapPotential v = random_trap(rng);
    const auto roots = solve_cubic(char_poly_coeffs(v, random_unit(rng), w(rng)));
    int complex_roots = 0;
    for (const auto& r : roots) complex_roots += r.imag() != 0.0;
    CHECK((complex_roots == 0 || complex_roots == 2));
    if (complex_roots == 2) CHECK(roots[0] == std::conj(roots[1]));
  }
}

TEST_CASE("roots are invariant under a rigid rotation of trap and axis") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(0.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const TrapPotential v = random_trap(rng);
    const Vec3 n = random_unit(rng);
    const Mat3 r = random_rotation(rng);
    const Mat3 vr = r * v.matrix() * r.transpose();
    const TrapPotential rotated(0.5 * (vr + vr.transpose()));
    const double omega = w(rng);
    const CubicCoefficients q1 = char_poly_coeffs(v, n, omega);
    const CubicCoefficients q2 = char_poly_coeffs(rotated, r * n, omega);
    const double scale = 1.0 + std::abs(q1.a_coef) + std::abs(q1.b_coef) + std::abs(q1.c_coef);
    CHECK(std::abs(q1.a_coef - q2.a_coef) < 1e-12 * scale);
    CHECK(std::abs(q1.b_coef - q2.b_coef) < 1e-11 * scale * scale);
    CHECK(std::abs(q1.c_coef - q2.c_coef) < 1e-10 * scale * scale * scale);
    CHECK(mode_spectrum(v, n, omega).classification == mode_spectrum(rotated, r * n, omega).classification);
  }
}

TEST_CASE("frequency scaling") {
  // V -> s^2 V and Omega -> s Omega scales every chi by s^2.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  std::uniform_real_distribution<double> su(0.1, 10.0);
  for (int i = 0; i < 300; ++i) {
    const TrapPotential v = random_trap(rng);
    const Vec3 n = random_unit(rng);
    const double s = su(rng);
    const double omega = w(rng);
    const TrapPotential vs(s * s * v.matrix());
    const ResonanceReport r1 = resonant_omegas(v, n);
    const ResonanceReport r2 = resonant_omegas(vs, n);
    CHECK(r2.omega_minus == doctest::Approx(s * r1.omega_minus).epsilon(1e-9));
    CHECK(r2.omega_plus == doctest::Approx(s * r1.omega_plus).epsilon(1e-9));
    const auto c1 = solve_cubic(char_poly_coeffs(v, n, omega));
    const auto c2 = solve_cubic(char_poly_coeffs(vs, n, s * omega));
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(c2[k] - s * s * c1[k]) < 1e-8 * s * s * (1.0 + std::abs(c1[k])));
    }
  }
}

TEST_CASE("mass does not enter the mode frequencies") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  std::uniform_real_distribution<double> logm(-6.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const TrapPotential v = random_trap(rng);
    const RotationSpec rot(random_unit(rng), w(rng));
    const TrapConfig a(v, rot, GravitySpec{}, 1.0);
    const TrapConfig b(v, rot, GravitySpec{}, std::pow(10.0, logm(rng)));
    Eigen::ComplexEigenSolver<CMat6> ea(system_matrix(a).m_mat.cast<Complex>(), false);
    Eigen::ComplexEigenSolver<CMat6> eb(system_matrix(b).m_mat.cast<Complex>(), false);
    for (int k = 0; k < 6; ++k) {
      double best = 1e300;
      for (int j = 0; j < 6; ++j) best = std::min(best, std::abs(ea.eigenvalues()(k) - eb.eigenvalues()(j)));
      CHECK(best < 1e-6 * (1.0 + std::abs(ea.eigenvalues()(k))));
    }
  }
}

TEST_CASE("axis-aligned discriminant is nonnegative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.0, 5.0);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 spec = random_spectrum(rng);
    const TrapPotential v = TrapPotential::from_squared_frequencies(spec);
    const Vec3 axis = Vec3::Unit(pick(rng));
    const AxisAlignedSpectrum s = axis_aligned_spectrum(v, axis, w(rng));
    CHECK(s.discriminant >= 0.0);
  }
}

TEST_CASE("lower resonance never exceeds the first critical rate") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const TrapPotential v = random_trap(rng);
    const LowerResonanceAudit a = verify_lower_resonance_stable(v, random_unit(rng));
    CHECK(a.holds);
  }
}

TEST_CASE("resonances satisfy their defining equation") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const TrapPotential v = random_trap(rng);
    const Vec3 n = random_unit(rng);
    const ResonanceReport rep = resonant_omegas(v, n);
    const DiscriminantSplit split = discriminant_split(v, n);
    CHECK(split.term1 >= 0.0);
    CHECK(split.term2 >= 0.0);
    for (double w : {rep.omega_minus, rep.omega_plus}) {
      const CubicCoefficients q = char_poly_coeffs(v, n, w);
      const double scale = std::pow(v.principal().values(2) + w * w, 3);
      CHECK(std::abs(q(w * w)) < 1e-10 * scale);
    }
  }
}

TEST_CASE("projectors resolve the identity at random resonances") {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const TrapPotential v = random_trap(rng);
    const Vec3 n = random_unit(rng);
    const RotationSpec rot(n, resonant_omegas(v, n).omega_minus);
    try {
      const SpectralData sd = spectral_data(v, rot, CVec3(Complex(1, 0.2), Complex(-0.4, 1), Complex(0.7, -0.3)));
      const CMat3 sum = sd.p0 + sd.p_plus + sd.p_minus;
      CHECK((sum - CMat3::Identity()).norm() < 1e-9);
      CHECK((sd.p0 * sd.p0 - sd.p0).norm() < 1e-9);
      CHECK((sd.p_plus * sd.p_minus).norm() < 1e-9);
      ++checked;
    } catch (const DegenerateSpectrum&) {
    }
  }
  CHECK(checked > 190);
}

}
