#include "rotrap/resonance.hpp"

#include <cmath>
#include <limits>

namespace rotrap {

std::string_view to_string(RegionPlacement p) {
  switch (p) {
    case RegionPlacement::LowerStable: return "LowerStable";
    case RegionPlacement::LowerInstability: return "LowerInstability";
    case RegionPlacement::UpperStable: return "UpperStable";
    case RegionPlacement::OscillatoryInstability: return "OscillatoryInstability";
  }
  return "Unknown";
}

DiscriminantSplit discriminant_split(const TrapPotential& potential, const Vec3& axis) {
  const SymEigen& pf = potential.principal();
  const double vx = pf.values(0);
  const double vy = pf.values(1);
  const double vz = pf.values(2);
  const Vec3 n = pf.vectors.transpose() * axis;
  const double nx2 = n.x() * n.x();
  const double ny2 = n.y() * n.y();
  const double nz2 = n.z() * n.z();

  const double first = (1.0 - nx2 / 2.0) * vy * vz - (1.0 + ny2 / 2.0) * vx * vz -
                       (1.0 + nz2 / 2.0) * vx * vy;
  const double second = 4.0 * vx *
                        (nz2 * (vz - vx) * (vy * vz + vy * vy / 2.0) +
                         ny2 * (vy - vx) * (vy * vz + vz * vz / 2.0));
  // The two terms add up to (E^2 - 4DF)/4.
  return {4.0 * first * first, 4.0 * second};
}

RegionPlacement place_in_regions(const TrapPotential& potential, const Vec3& axis, double omega,
                                 bool* on_boundary, const Tolerances& tol) {
  const double omega1 = lower_instability_bounds(potential, axis).omega1;
  auto placement_at = [&](double w) {
    switch (mode_spectrum(potential, axis, w, tol).classification) {
      case Stability::ExponentialInstability: return RegionPlacement::LowerInstability;
      case Stability::OscillatoryInstability: return RegionPlacement::OscillatoryInstability;
      case Stability::Stable: break;
    }
    return w < omega1 ? RegionPlacement::LowerStable : RegionPlacement::UpperStable;
  };
  const RegionPlacement below = placement_at(omega * (1.0 - 1e-6));
  const RegionPlacement above = placement_at(omega * (1.0 + 1e-6));
  if (on_boundary != nullptr) *on_boundary = below != above;
  return below;
}

ResonanceReport resonant_omegas(const TrapPotential& potential, const Vec3& axis,
                                const Tolerances& tol) {
  ResonanceReport rep;
  const double tr = potential.trace();
  const double nvn = potential.along(axis);
  rep.d_coef = -2.0 * (tr - nvn);
  rep.e_coef = potential.pair_sum() + tr * nvn - potential.squared_along(axis);
  rep.f_coef = -potential.determinant();
  rep.discriminant = discriminant_split(potential, axis).total();

  const double d = rep.d_coef;
  const double e = rep.e_coef;
  const double f = rep.f_coef;
  if (std::abs(d) <= std::numeric_limits<double>::epsilon() * std::abs(e)) {
    rep.omega_minus = std::sqrt(-f / e);
    rep.omega_plus = std::numeric_limits<double>::infinity();
  } else {
    // Larger-magnitude root first, the other from the product F/D.
    const double q = -0.5 * (e + std::copysign(std::sqrt(rep.discriminant), e));
    const double w_a = q / d;
    const double w_b = f / q;
    rep.omega_minus = std::sqrt(std::min(w_a, w_b));
    rep.omega_plus = std::sqrt(std::max(w_a, w_b));
  }
  rep.degenerate = rep.omega_plus - rep.omega_minus <= tol.degenerate_rel * rep.omega_plus;
  rep.bounds = lower_instability_bounds(potential, axis);
  rep.placement_minus = place_in_regions(potential, axis, rep.omega_minus, &rep.minus_on_boundary, tol);
  if (std::isfinite(rep.omega_plus)) {
    rep.placement_plus = place_in_regions(potential, axis, rep.omega_plus, &rep.plus_on_boundary, tol);
  }
  return rep;
}

std::optional<MergedResonance> degeneracy_condition(const TrapPotential& potential,
                                                    const Tolerances& tol) {
  const SymEigen& pf = potential.principal();
  const double vx = pf.values(0);
  const double vy = pf.values(1);
  const double vz = pf.values(2);
  const double lhs = 1.0 / (2.0 * vx);
  if (std::abs(lhs - (1.0 / vy + 1.0 / vz)) > tol.root_rel * lhs) return std::nullopt;

  MergedResonance out;
  out.omega = std::sqrt(vx);
  out.axis = pf.vectors.col(0);
  out.fully_anisotropic = (vy - vx > tol.root_rel * vz) && (vz - vy > tol.root_rel * vz);
  return out;
}

LowerResonanceAudit verify_lower_resonance_stable(const TrapPotential& potential, const Vec3& axis,
                                                  const Tolerances& tol) {
  const ResonanceReport rep = resonant_omegas(potential, axis, tol);
  const InstabilityBounds& ib = rep.bounds;

  LowerResonanceAudit audit;
  audit.omega_minus = rep.omega_minus;
  audit.omega1 = ib.omega1;
  audit.margin = ib.omega1 - rep.omega_minus;
  audit.crossing_resonance = rep.f_coef;
  audit.crossing_critical = -ib.c;
  audit.slope_resonance = rep.e_coef;
  audit.slope_critical = ib.b;
  const double w = rep.omega_minus * rep.omega_minus;
  audit.critical_at_resonance = (-ib.a * w + ib.b) * w - ib.c;
  audit.holds = audit.margin >= -1e-9 * std::max(1.0, ib.omega1);
  return audit;
}

std::vector<LowerResonanceAudit> audit_lower_resonances(std::span<const TrapSample> samples,
                                                        const Tolerances& tol) {
  std::vector<LowerResonanceAudit> out(samples.size());
  const auto count = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = verify_lower_resonance_stable(samples[k].potential, samples[k].axis, tol);
  }
  return out;
}

std::vector<LowerResonanceAudit> audit_lower_resonances_serial(
    std::span<const TrapSample> samples, const Tolerances& tol) {
  std::vector<LowerResonanceAudit> out;
  out.reserve(samples.size());
  for (const TrapSample& s : samples) {
    out.push_back(verify_lower_resonance_stable(s.potential, s.axis, tol));
  }
  return out;
}

}  // namespace rotrap
