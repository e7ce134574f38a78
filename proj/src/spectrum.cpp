#include "rotrap/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rotrap {
namespace {

bool by_real_then_imag(const Complex& x, const Complex& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

Complex newton_polish(const CubicCoefficients& q, Complex z) {
  for (int it = 0; it < 3; ++it) {
    const Complex f = q(z);
    const Complex df = (3.0 * z + 2.0 * q.a_coef) * z + q.b_coef;
    if (std::abs(df) == 0.0) break;
    const Complex next = z - f / df;
    if (!(std::abs(q(next)) < std::abs(f))) break;
    z = next;
  }
  return z;
}

double newton_polish(const CubicCoefficients& q, double x) {
  for (int it = 0; it < 3; ++it) {
    const double f = q(x);
    const double df = (3.0 * x + 2.0 * q.a_coef) * x + q.b_coef;
    if (df == 0.0) break;
    const double next = x - f / df;
    if (!(std::abs(q(next)) < std::abs(f))) break;
    x = next;
  }
  return x;
}

std::array<Complex, 3> companion_roots(const CubicCoefficients& q) {
  Mat3 companion;
  companion << 0.0, 0.0, -q.c_coef,
               1.0, 0.0, -q.b_coef,
               0.0, 1.0, -q.a_coef;
  Eigen::EigenSolver<Mat3> solver(companion, false);
  const auto ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

// Snap nearly-real roots onto the axis and force a complex pair to be an
// exact conjugate pair so classification sees a consistent picture.
std::array<Complex, 3> tidy(const CubicCoefficients& q, std::array<Complex, 3> roots) {
  std::sort(roots.begin(), roots.end(),
            [](const Complex& x, const Complex& y) { return std::abs(x.imag()) < std::abs(y.imag()); });
  // The root with the smallest |Im| of a real cubic is always real.
  roots[0] = newton_polish(q, roots[0].real());
  const double scale = std::max({1.0, std::abs(roots[1]), std::abs(roots[2])});
  if (std::abs(roots[1].imag()) == 0.0 && std::abs(roots[2].imag()) == 0.0) {
    roots[1] = newton_polish(q, roots[1].real());
    roots[2] = newton_polish(q, roots[2].real());
  } else if (std::abs(roots[1].imag()) + std::abs(roots[2].imag()) <= 1e-15 * scale) {
    roots[1] = roots[1].real();
    roots[2] = roots[2].real();
  } else {
    const Complex z = newton_polish(q, roots[1].imag() >= 0.0 ? roots[1] : roots[2]);
    roots[1] = std::conj(z);
    roots[2] = z;
  }
  std::sort(roots.begin(), roots.end(), by_real_then_imag);
  return roots;
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::ExponentialInstability: return "ExponentialInstability";
    case Stability::OscillatoryInstability: return "OscillatoryInstability";
  }
  return "Unknown";
}

CubicCoefficients char_poly_coeffs(const TrapPotential& potential, const Vec3& axis,
                                   double omega) {
  const double w2 = omega * omega;
  const double tr = potential.trace();
  const double nvn = potential.along(axis);
  const double nv2n = potential.squared_along(axis);
  CubicCoefficients q;
  q.a_coef = -2.0 * w2 - tr;
  q.b_coef = w2 * w2 + w2 * (3.0 * nvn - tr) + potential.pair_sum();
  q.c_coef = w2 * (tr - w2) * nvn - w2 * nv2n - potential.determinant();
  return q;
}

std::array<Complex, 3> solve_cubic(const CubicCoefficients& q) {
  const double a = q.a_coef;
  const double b = q.b_coef;
  const double c = q.c_coef;
  const double qq = (a * a - 3.0 * b) / 9.0;
  const double rr = (a * (2.0 * a * a - 9.0 * b) + 27.0 * c) / 54.0;
  const double r2 = rr * rr;
  const double q3 = qq * qq * qq;
  const double shift = a / 3.0;

  // Near a multiple root the closed form loses about half the digits.
  if (std::abs(r2 - q3) <= 1e-10 * std::max(std::abs(r2), std::abs(q3))) {
    return tidy(q, companion_roots(q));
  }

  std::array<Complex, 3> roots;
  if (r2 < q3) {
    const double t = std::acos(std::clamp(rr / std::sqrt(q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(qq);
    roots[0] = m * std::cos(t / 3.0) - shift;
    roots[1] = m * std::cos((t + kTwoPi) / 3.0) - shift;
    roots[2] = m * std::cos((t - kTwoPi) / 3.0) - shift;
  } else {
    const double s = -std::copysign(std::cbrt(std::abs(rr) + std::sqrt(r2 - q3)), rr);
    const double t = (s == 0.0) ? 0.0 : qq / s;
    roots[0] = s + t - shift;
    const double re = -0.5 * (s + t) - shift;
    const double im = 0.5 * std::sqrt(3.0) * (s - t);
    roots[1] = Complex(re, im);
    roots[2] = Complex(re, -im);
  }
  return tidy(q, roots);
}

SpectrumReport classify_roots(const std::array<Complex, 3>& chi_roots, const Tolerances& tol) {
  SpectrumReport report;
  report.chi_roots = chi_roots;
  for (std::size_t k = 0; k < 3; ++k) {
    const Complex w = std::sqrt(chi_roots[k]);
    report.omega_values[2 * k] = w;
    report.omega_values[2 * k + 1] = -w;

    const double scale = std::max(1.0, std::abs(chi_roots[k]));
    const double im = std::abs(chi_roots[k].imag());
    const double re = chi_roots[k].real();
    if (im > tol.root_real_rel * scale) {
      ++report.complex_count;
      continue;
    }
    if (im > 0.0) report.marginal = true;
    if (re < -tol.root_sign_rel * scale) {
      ++report.negative_real_count;
    } else if (std::abs(re) <= tol.root_sign_rel * scale) {
      report.marginal = true;
    }
  }
  if (report.complex_count > 0) {
    report.classification = Stability::OscillatoryInstability;
  } else if (report.negative_real_count > 0) {
    report.classification = Stability::ExponentialInstability;
  } else {
    report.classification = Stability::Stable;
  }
  return report;
}

SpectrumReport mode_spectrum(const TrapPotential& potential, const Vec3& axis, double omega,
                             const Tolerances& tol) {
  return classify_roots(solve_cubic(char_poly_coeffs(potential, axis, omega)), tol);
}

InstabilityBounds lower_instability_bounds(const TrapPotential& potential, const Vec3& axis) {
  InstabilityBounds out;
  out.a = potential.along(axis);
  out.b = potential.trace() * out.a - potential.squared_along(axis);
  out.c = potential.determinant();
  const double disc = std::max(0.0, out.b * out.b - 4.0 * out.a * out.c);
  // b > 0, so b + sqrt(disc) never cancels; the small root comes from the product.
  const double big = out.b + std::sqrt(disc);
  out.omega1 = std::sqrt(2.0 * out.c / big);
  out.omega2 = std::sqrt(big / (2.0 * out.a));
  return out;
}

TiltCondition degeneracy_tilt(const TrapPotential& potential, const Tolerances& tol) {
  const SymEigen& pf = potential.principal();
  const double vx = pf.values(0);
  const double vy = pf.values(1);
  const double vz = pf.values(2);

  TiltCondition out;
  auto coordinate_index = [&](int k) {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(std::abs(pf.vectors(i, k)) - 1.0) <= tol.principal_axis) return i;
    }
    return -1;
  };
  out.lowest_axis = coordinate_index(0);
  out.highest_axis = coordinate_index(2);

  if (vy - vx <= tol.root_rel * vz || vz - vy <= tol.root_rel * vz) {
    out.fully_anisotropic = false;
    return out;
  }
  out.sin2_theta = (1.0 - vx / vy) / (1.0 - vx / vz);
  const double theta = std::asin(std::sqrt(out.sin2_theta));
  out.theta = theta;
  out.axis = (std::sin(theta) * pf.vectors.col(0) + std::cos(theta) * pf.vectors.col(2)).normalized();
  return out;
}

AxisAlignedSpectrum axis_aligned_spectrum(const TrapPotential& potential, const Vec3& axis,
                                          double omega, const Tolerances& tol) {
  const SymEigen& pf = potential.principal();
  int k = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis.dot(pf.vectors.col(i))) >= 1.0 - tol.principal_axis) k = i;
  }
  if (k < 0) {
    throw ContractViolation("axis_aligned_spectrum: rotation axis is not a principal axis");
  }
  const double va = pf.values((k + 1) % 3);
  const double vb = pf.values((k + 2) % 3);
  const double w2 = omega * omega;

  AxisAlignedSpectrum out;
  out.principal_index = k;
  out.axis_root = pf.values(k);
  out.discriminant = 8.0 * w2 * (va + vb) + (va - vb) * (va - vb);

  // chi^2 - s chi + p with p = (Omega^2 - Va)(Omega^2 - Vb)
  const double s = 2.0 * w2 + va + vb;
  const double p = (w2 - va) * (w2 - vb);
  const double big = 0.5 * (s + std::sqrt(out.discriminant));
  const double small = (big == 0.0) ? 0.0 : p / big;
  out.chi_roots = {out.axis_root, big, small};
  std::sort(out.chi_roots.begin(), out.chi_roots.end());
  return out;
}

}  // namespace rotrap
