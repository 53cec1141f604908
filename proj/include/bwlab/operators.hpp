#pragma once

// Sign-pattern projectors and the energy-independent composite operators
// built from them.

#include "bwlab/model_space.hpp"

namespace bwlab {

/// Diagonal 0/1 projectors onto the four pair sign patterns.
struct ProjectorSet {
  Operator pp, pm, mp, mm;
};

ProjectorSet projectors(const TwoParticleBasis& basis);

/// D(E) = E - h1 - h2, diagonal with entries E - e_i - e_j.
Operator build_D(const TwoParticleBasis& basis, double E);

/// D_c = E_c - h1 - h2. Same construction as build_D; kept separate so call
/// sites say which energy they mean.
Operator build_Dc(const TwoParticleBasis& basis, double E_c);

/// Elementwise inverse of a diagonal operator. Throws DegenerateError when
/// any diagonal entry is below kDegenerateThreshold in magnitude.
Operator invert_diagonal(const Operator& diag);

/// No-pair Coulomb Hamiltonian h1 + h2 + Lpp Ic Lpp.
Operator build_Hc(const TwoParticleBasis& basis, const ProjectorSet& proj, const Operator& coulomb);

/// Coulomb virtual-pair operator Lpp Ic (1 - Lpp) - Lmm Ic. Not symmetric.
Operator build_HDelta1(const ProjectorSet& proj, const Operator& coulomb);

/// (Lpp - Lmm) D^{-1}: +1/(E - e_i - e_j) on ++ pairs, -1/(...) on -- pairs,
/// zero on mixed pairs. Only ++ and -- denominators are checked.
Operator build_G0(const TwoParticleBasis& basis, double E);

}  // namespace bwlab
