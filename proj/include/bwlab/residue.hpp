#pragma once

// Closed-form evaluation of i/(2 pi) * Integral d(eps) over products of
// electron propagators, by residues.
//
// Particle-1 propagator for a state of energy e is 1/(E/2 + eps - e + i eta sgn e),
// particle-2 propagator is 1/(E/2 - eps - e + i eta sgn e). In the eta -> 0
// limit a particle-1 factor has its pole at eps = e - E/2, in the upper half
// plane iff e < 0; a particle-2 factor has its pole at eps = E/2 - e, in the
// upper half plane iff e > 0. Every product of two or more factors decays at
// least as eps^-2, so the contour may be closed in either half plane.

#include <cstdint>
#include <span>

namespace bwlab {

struct PropagatorFactor {
  std::uint8_t particle;  // 1 or 2
  double energy;
};

/// Poles closer than this (absolute, scaled by 1 + |pole|) are treated as one
/// confluent pole. Coinciding poles from opposite half planes pinch the
/// contour and raise DegenerateError.
inline constexpr double kPoleMergeTolerance = 1e-10;

/// i/(2 pi) Integral d(eps) prod_k factors[k](eps), evaluated analytically.
/// Handles repeated (confluent) poles of any multiplicity.
/// Requires at least two factors.
double contour_value(double E, std::span<const PropagatorFactor> factors);

}  // namespace bwlab
