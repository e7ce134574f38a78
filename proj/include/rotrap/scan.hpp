// Stability scans over a grid of rotation rates.
//
// stability_scan evaluates grid points and refines boundaries with OpenMP;
// stability_scan_serial is the single-threaded reference the tests compare
// it against. Both produce identical rows and boundaries.
#pragma once

#include "rotrap/spectrum.hpp"

#include <vector>

namespace rotrap {

struct ScanRow {
  double omega = 0.0;
  std::array<Complex, 3> chi_roots{};
  Stability classification = Stability::Stable;
  bool marginal = false;
};

struct ScanBoundary {
  double omega = 0.0;
  Stability below = Stability::Stable;
  Stability above = Stability::Stable;
};

struct ScanRegion {
  double omega_begin = 0.0;
  double omega_end = 0.0;
  Stability classification = Stability::Stable;
};

struct StabilityScan {
  std::vector<ScanRow> rows;             // strictly increasing omega
  std::vector<ScanBoundary> boundaries;  // one per classification change

  std::vector<ScanRegion> regions() const;
  std::vector<Stability> sequence() const;
};

StabilityScan stability_scan(const TrapPotential& potential, const Vec3& axis,
                             double omega_min, double omega_max, int steps,
                             const Tolerances& tol = default_tolerances());

StabilityScan stability_scan_serial(const TrapPotential& potential, const Vec3& axis,
                                    double omega_min, double omega_max, int steps,
                                    const Tolerances& tol = default_tolerances());

/// Bisection on classification change inside [lo, hi]; `below` is the
/// classification at lo. Stops once the bracket is below ~4 ulp of hi.
double locate_boundary(const TrapPotential& potential, const Vec3& axis, double lo, double hi,
                       Stability below, const Tolerances& tol = default_tolerances());

}  // namespace rotrap
