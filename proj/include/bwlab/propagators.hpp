#pragma once

// Relative-energy propagator algebra on the two-particle basis.
//
// F^-1(eps) = S1(eps) S2(eps) is diagonal on the pair basis. All integrals
// here carry the measure i * d(eps) / (2 pi) and are evaluated in the
// eta -> 0 limit by residues (see residue.hpp); quadrature.hpp holds the
// independent numerical check.

#include "bwlab/model_space.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace bwlab {

struct IntegrationSettings {
  /// Feynman regulators for the quadrature oracle, largest first.
  std::vector<double> eta_sequence{4e-3, 2e-3, 1e-3, 5e-4};
  /// Gauss-Legendre nodes per panel.
  int quadrature_points = 16;
  /// Integration range is [-L, L] with L = cutoff_factor * max|e|.
  double cutoff_factor = 1e4;
  /// Number of terms kept in the J = g (1 - F^-1 g)^-1 expansion.
  int j_order = 2;
  /// Relative agreement required between the last two eta extrapolants.
  double extrapolation_tolerance = 1e-6;

  bool operator==(const IntegrationSettings&) const = default;
};

/// Throws ConfigError naming the offending key.
void validate(const IntegrationSettings& s);

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Diagonal of S_particle(eps) lifted to the pair basis: particle 1 depends on
/// the first index of each pair, particle 2 on the second.
ComplexVector propagator_S(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                           double E, double eps, int particle, double eta);

/// i Integral d(eps)/(2 pi) F^-1: +1/(E - e_i - e_j) on ++, -1/(...) on --,
/// zero on mixed pairs.
Operator contour_integral_Finv(const TwoParticleBasis& basis,
                               const SingleParticleSpectrum& spectrum, double E);

/// X[a, b] = A[a, b] * i Integral d(eps)/(2 pi) F^-1_a F^-1_b.
Operator sandwich_integral(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                           double E, const Operator& A);

/// How the two outer F^-1 factors of a J-series term are represented.
enum class EndpointForm : std::uint8_t {
  /// F^-1 = S1 S2
  product,
  /// S1 + S2, i.e. D F^-1. Used to evaluate the transformed route
  /// F^-1 J F^-1 = D^-1 [(S1 + S2) J (S1 + S2)] D^-1.
  sum,
};

/// Terms k = 0 .. order-1 of i Integral d(eps)/(2 pi) F^-1 (g F^-1)^k g F^-1.
/// With EndpointForm::sum the outer F^-1 factors become (S1 + S2).
std::vector<Operator> j_series(const TwoParticleBasis& basis,
                               const SingleParticleSpectrum& spectrum, double E,
                               const Operator& g_delta, int order,
                               EndpointForm endpoints = EndpointForm::product);

/// Sum of the j_series terms.
Operator j_series_sum(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                      double E, const Operator& g_delta, int order,
                      EndpointForm endpoints = EndpointForm::product);

}  // namespace bwlab
