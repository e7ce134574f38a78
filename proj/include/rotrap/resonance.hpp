// Gravity-induced resonant rotation rates.
//
// A resonance is a rotation rate Omega that equals one of the rotating-frame
// mode frequencies at that same Omega, i.e. Q(chi = Omega^2) = 0 with the
// coefficients of Q evaluated at Omega. That reduces to the biquadratic
//   D Omega^4 + E Omega^2 + F = 0,
// which never has more than two positive solutions. Geometry only: gravity
// does not enter, and neither does the mass.
#pragma once

#include "rotrap/core.hpp"
#include "rotrap/spectrum.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rotrap {

enum class RegionPlacement { LowerStable, LowerInstability, UpperStable, OscillatoryInstability };

std::string_view to_string(RegionPlacement p);

struct ResonanceReport {
  double d_coef = 0.0;
  double e_coef = 0.0;
  double f_coef = 0.0;
  double discriminant = 0.0;  // E^2 - 4 D F, evaluated as a sum of nonnegative terms
  double omega_minus = 0.0;
  double omega_plus = 0.0;
  bool degenerate = false;
  RegionPlacement placement_minus = RegionPlacement::LowerStable;
  RegionPlacement placement_plus = RegionPlacement::LowerStable;
  // Set when the two sides of a resonance classify differently.
  bool minus_on_boundary = false;
  bool plus_on_boundary = false;
  InstabilityBounds bounds;
};

ResonanceReport resonant_omegas(const TrapPotential& potential, const Vec3& axis,
                                const Tolerances& tol = default_tolerances());

/// Where a rotation rate falls among the stability regions of (potential, axis).
/// Evaluated just below and just above omega; `on_boundary` is set when the
/// two disagree, in which case the side below wins.
RegionPlacement place_in_regions(const TrapPotential& potential, const Vec3& axis, double omega,
                                 bool* on_boundary = nullptr,
                                 const Tolerances& tol = default_tolerances());

/// E^2 - 4 D F written as term1 + term2, both nonnegative, in the principal
/// frame ordered V_x < V_y < V_z.
struct DiscriminantSplit {
  double term1 = 0.0;
  double term2 = 0.0;
  double total() const { return term1 + term2; }
};

DiscriminantSplit discriminant_split(const TrapPotential& potential, const Vec3& axis);

/// The two resonances merge only for rotation about the lowest-frequency axis
/// of a trap with 1/(2 V_x) = 1/V_y + 1/V_z; they then sit at sqrt(V_x).
struct MergedResonance {
  double omega = 0.0;
  Vec3 axis = Vec3::Zero();
  bool fully_anisotropic = true;
};

std::optional<MergedResonance> degeneracy_condition(const TrapPotential& potential,
                                                    const Tolerances& tol = default_tolerances());

/// Record that the lower resonance sits at or below the first critical rate.
/// Both parabolas (the resonance biquadratic and C(Omega)) in W = Omega^2 meet
/// the W = 0 axis at -Det{V}; the resonance one is steeper there.
struct LowerResonanceAudit {
  double omega_minus = 0.0;
  double omega1 = 0.0;
  double margin = 0.0;  // omega1 - omega_minus
  double crossing_resonance = 0.0;  // resonance parabola at W = 0
  double crossing_critical = 0.0;   // C at W = 0
  double slope_resonance = 0.0;     // E
  double slope_critical = 0.0;      // b
  double critical_at_resonance = 0.0;  // C(omega_minus), <= 0 below omega1
  bool holds = false;
};

LowerResonanceAudit verify_lower_resonance_stable(const TrapPotential& potential, const Vec3& axis,
                                                  const Tolerances& tol = default_tolerances());

struct TrapSample {
  TrapPotential potential;
  Vec3 axis;
};

/// Batched audits: OpenMP kernel and its serial reference.
std::vector<LowerResonanceAudit> audit_lower_resonances(std::span<const TrapSample> samples,
                                                        const Tolerances& tol = default_tolerances());
std::vector<LowerResonanceAudit> audit_lower_resonances_serial(
    std::span<const TrapSample> samples, const Tolerances& tol = default_tolerances());

}  // namespace rotrap
