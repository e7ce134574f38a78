// Shared generators for the tests.
#pragma once

#include "rotrap/core.hpp"

#include <random>

namespace testsupport {

using rotrap::Mat3;
using rotrap::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vec3 v;
  do {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Mat3> qr(g);
  Mat3 q = qr.householderQ();
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

// Squared frequencies in [lo, hi], sorted ascending.
inline Vec3 random_spectrum(std::mt19937_64& rng, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec3 v(u(rng), u(rng), u(rng));
  std::sort(v.data(), v.data() + 3);
  return v;
}

inline rotrap::TrapPotential random_trap(std::mt19937_64& rng) {
  const Mat3 r = random_rotation(rng);
  const Mat3 v = r * random_spectrum(rng).asDiagonal() * r.transpose();
  return rotrap::TrapPotential(0.5 * (v + v.transpose()));
}

}  // namespace testsupport
