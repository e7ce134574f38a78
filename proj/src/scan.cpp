#include "rotrap/scan.hpp"

#include <cmath>
#include <limits>

namespace rotrap {
namespace {

void check_grid(double omega_min, double omega_max, int steps) {
  if (!(omega_min < omega_max) || !std::isfinite(omega_min) || !std::isfinite(omega_max)) {
    throw ContractViolation("stability_scan: need omega_min < omega_max");
  }
  if (omega_min < 0.0) throw ContractViolation("stability_scan: omega_min must be >= 0");
  if (steps < 2) throw ContractViolation("stability_scan: steps must be >= 2");
}

// Grid point i computed from the endpoints directly so both kernels agree bit for bit.
double grid_point(double omega_min, double omega_max, int steps, int i) {
  if (i == steps - 1) return omega_max;
  return omega_min + (omega_max - omega_min) * static_cast<double>(i) / (steps - 1);
}

ScanRow evaluate_row(const TrapPotential& potential, const Vec3& axis, double omega,
                     const Tolerances& tol) {
  const SpectrumReport rep = mode_spectrum(potential, axis, omega, tol);
  return {omega, rep.chi_roots, rep.classification, rep.marginal};
}

std::vector<std::size_t> change_indices(const std::vector<ScanRow>& rows) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].classification != rows[i - 1].classification) out.push_back(i);
  }
  return out;
}

}  // namespace

double locate_boundary(const TrapPotential& potential, const Vec3& axis, double lo, double hi,
                       Stability below, const Tolerances& tol) {
  constexpr double ulp = std::numeric_limits<double>::epsilon();
  auto converged = [&] { return hi - lo <= 4.0 * ulp * std::max(1.0, hi); };

  // Entering or leaving the exponential window is a sign change of C, which
  // is sharper than the tolerance-based classification near chi = 0.
  const Stability above = mode_spectrum(potential, axis, hi, tol).classification;
  const bool exponential_edge =
      (below == Stability::Stable && above == Stability::ExponentialInstability) ||
      (below == Stability::ExponentialInstability && above == Stability::Stable);
  auto c_at = [&](double w) { return char_poly_coeffs(potential, axis, w).c_coef; };
  if (exponential_edge && (c_at(lo) > 0.0) != (c_at(hi) > 0.0)) {
    const bool lo_positive = c_at(lo) > 0.0;
    for (int it = 0; it < 200 && !converged(); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((c_at(mid) > 0.0) == lo_positive) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  for (int it = 0; it < 200 && !converged(); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mode_spectrum(potential, axis, mid, tol).classification == below) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

StabilityScan stability_scan(const TrapPotential& potential, const Vec3& axis,
                             double omega_min, double omega_max, int steps,
                             const Tolerances& tol) {
  check_grid(omega_min, omega_max, steps);
  StabilityScan scan;
  scan.rows.resize(static_cast<std::size_t>(steps));

#pragma omp parallel for schedule(static)
  for (int i = 0; i < steps; ++i) {
    scan.rows[static_cast<std::size_t>(i)] =
        evaluate_row(potential, axis, grid_point(omega_min, omega_max, steps, i), tol);
  }

  const auto changes = change_indices(scan.rows);
  scan.boundaries.resize(changes.size());
  const int n_changes = static_cast<int>(changes.size());

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_changes; ++k) {
    const ScanRow& lo = scan.rows[changes[static_cast<std::size_t>(k)] - 1];
    const ScanRow& hi = scan.rows[changes[static_cast<std::size_t>(k)]];
    scan.boundaries[static_cast<std::size_t>(k)] = {
        locate_boundary(potential, axis, lo.omega, hi.omega, lo.classification, tol),
        lo.classification, hi.classification};
  }
  return scan;
}

StabilityScan stability_scan_serial(const TrapPotential& potential, const Vec3& axis,
                                    double omega_min, double omega_max, int steps,
                                    const Tolerances& tol) {
  check_grid(omega_min, omega_max, steps);
  StabilityScan scan;
  scan.rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    scan.rows.push_back(evaluate_row(potential, axis, grid_point(omega_min, omega_max, steps, i), tol));
  }
  for (std::size_t idx : change_indices(scan.rows)) {
    const ScanRow& lo = scan.rows[idx - 1];
    const ScanRow& hi = scan.rows[idx];
    scan.boundaries.push_back(
        {locate_boundary(potential, axis, lo.omega, hi.omega, lo.classification, tol),
         lo.classification, hi.classification});
  }
  return scan;
}

std::vector<ScanRegion> StabilityScan::regions() const {
  std::vector<ScanRegion> out;
  if (rows.empty()) return out;
  double begin = rows.front().omega;
  Stability current = rows.front().classification;
  for (const ScanBoundary& b : boundaries) {
    out.push_back({begin, b.omega, current});
    begin = b.omega;
    current = b.above;
  }
  out.push_back({begin, rows.back().omega, current});
  return out;
}

std::vector<Stability> StabilityScan::sequence() const {
  std::vector<Stability> out;
  for (const ScanRegion& r : regions()) out.push_back(r.classification);
  return out;
}

}  // namespace rotrap
