#pragma once

// Numerical check of the residue engine: integrate along the real eps axis
// with finite Feynman regulator eta, then extrapolate eta -> 0.
//
// For a fixed eta the exact integral is a real rational function of i*eta,
// so its real part is even in eta and its imaginary part odd. The
// extrapolation uses exactly those expansions: real part in {1, eta^2,
// eta^4, ...}, imaginary part in {1, eta, eta^3, ...}. The extrapolated
// imaginary part is a diagnostic and should vanish.

#include "bwlab/model_space.hpp"
#include "bwlab/propagators.hpp"

#include <span>
#include <vector>

namespace bwlab {

struct QuadratureResult {
  Operator real;   // extrapolated real part (the oracle value)
  Matrix imag;     // extrapolated imaginary part (diagnostic)
  double max_abs_imag = 0.0;
  /// Largest |extrapolant(all etas) - extrapolant(without the largest eta)|,
  /// relative to the largest entry of the result.
  double extrapolation_spread = 0.0;
  std::size_t nodes_per_eta = 0;
};

/// i Integral d(eps)/(2 pi) F^-1 A F^-1 entrywise (A is eps-independent).
QuadratureResult quadrature_oracle(const TwoParticleBasis& basis,
                                   const SingleParticleSpectrum& spectrum, double E,
                                   const Operator& A, const IntegrationSettings& settings);

/// i Integral d(eps)/(2 pi) F^-1 (diagonal). Includes the analytic
/// contribution of the -1/eps^2 tail beyond the cutoff.
QuadratureResult quadrature_oracle_Finv(const TwoParticleBasis& basis,
                                        const SingleParticleSpectrum& spectrum, double E,
                                        const IntegrationSettings& settings);

/// i Integral d(eps)/(2 pi) F^-1 A_1 F^-1 A_2 ... A_m F^-1 by dense complex
/// products at every node. Cost grows as dim^3 per node; meant for small
/// bases.
QuadratureResult quadrature_oracle_chain(const TwoParticleBasis& basis,
                                         const SingleParticleSpectrum& spectrum, double E,
                                         std::span<const Operator> inner,
                                         const IntegrationSettings& settings);

/// Panel breakpoints on [-L, L]: every pole real part plus geometric shells
/// at eta/4 * 2^k around it.
std::vector<double> panel_breakpoints(std::span<const double> pole_positions, double eta,
                                      double cutoff);

/// Value at zero of the least-squares fit of `values` sampled at `eta` with
/// the monomials eta^p, p in `powers` (powers[0] must be 0).
double extrapolate_to_zero(std::span<const double> eta, std::span<const double> values,
                           std::span<const int> powers);

}  // namespace bwlab
