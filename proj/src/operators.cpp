#include "bwlab/operators.hpp"

#include "bwlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace bwlab {

namespace {

Operator pattern_projector(const TwoParticleBasis& basis, PairPattern p) {
  Vector d(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k)
    d(static_cast<Eigen::Index>(k)) = basis.pattern(k) == p ? 1.0 : 0.0;
  return Operator::diagonal(d);
}

void check_dims(const Operator& a, std::size_t dim, const char* what) {
  if (a.dim() != dim) {
    std::ostringstream os;
    os << what << ": dimension " << a.dim() << " does not match basis dimension " << dim;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

ProjectorSet projectors(const TwoParticleBasis& basis) {
  return {pattern_projector(basis, PairPattern::pp), pattern_projector(basis, PairPattern::pm),
          pattern_projector(basis, PairPattern::mp), pattern_projector(basis, PairPattern::mm)};
}

Operator build_D(const TwoParticleBasis& basis, double E) {
  Vector d(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k)
    d(static_cast<Eigen::Index>(k)) = E - basis.pair_energy(k);
  return Operator::diagonal(d);
}

Operator build_Dc(const TwoParticleBasis& basis, double E_c) { return build_D(basis, E_c); }

Operator invert_diagonal(const Operator& diag) {
  const Matrix& m = diag.matrix();
  Vector inv(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    const double x = m(k, k);
    if (!(std::abs(x) >= kDegenerateThreshold)) {
      std::ostringstream os;
      os << "degenerate denominator " << x << " at pair index " << k;
      throw DegenerateError(os.str());
    }
    inv(k) = 1.0 / x;
  }
  return Operator::diagonal(inv);
}

Operator build_Hc(const TwoParticleBasis& basis, const ProjectorSet& proj,
                  const Operator& coulomb) {
  check_dims(coulomb, basis.dim(), "build_Hc");
  if (!is_symmetric(coulomb.matrix())) throw std::invalid_argument("build_Hc: Ic not symmetric");
  const Matrix& P = proj.pp.matrix();
  Matrix h = P * coulomb.matrix() * P;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    h(i, i) += basis.pair_energy(k);
  }
  h = 0.5 * (h + h.transpose()).eval();
  return Operator(std::move(h), true);
}

Operator build_HDelta1(const ProjectorSet& proj, const Operator& coulomb) {
  check_dims(coulomb, proj.pp.dim(), "build_HDelta1");
  const Matrix& P = proj.pp.matrix();
  const Matrix& M = proj.mm.matrix();
  const Matrix one = Matrix::Identity(P.rows(), P.cols());
  return Operator(P * coulomb.matrix() * (one - P) - M * coulomb.matrix(), false);
}

Operator build_G0(const TwoParticleBasis& basis, double E) {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const PairPattern p = basis.pattern(k);
    if (p != PairPattern::pp && p != PairPattern::mm) continue;
    const double den = E - basis.pair_energy(k);
    if (!(std::abs(den) >= kDegenerateThreshold)) {
      std::ostringstream os;
      os << "degenerate denominator " << den << " on " << to_string(p) << " pair " << k;
      throw DegenerateError(os.str());
    }
    d(static_cast<Eigen::Index>(k)) = (p == PairPattern::pp ? 1.0 : -1.0) / den;
  }
  return Operator::diagonal(d);
}

}  // namespace bwlab
