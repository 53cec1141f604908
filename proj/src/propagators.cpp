#include "bwlab/propagators.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/operators.hpp"
#include "bwlab/residue.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bwlab {

void validate(const IntegrationSettings& s) {
  if (s.eta_sequence.size() < 2) throw ConfigError("eta_sequence needs at least two values");
  for (std::size_t k = 0; k < s.eta_sequence.size(); ++k) {
    if (!(s.eta_sequence[k] > 0.0)) throw ConfigError("eta_sequence values must be > 0");
    if (k > 0 && !(s.eta_sequence[k] < s.eta_sequence[k - 1])) {
      throw ConfigError("eta_sequence must be strictly decreasing");
    }
  }
  if (s.quadrature_points < 2) throw ConfigError("quadrature_points must be >= 2");
  if (!(s.cutoff_factor >= 100.0)) throw ConfigError("cutoff_factor must be >= 100");
  if (s.j_order < 1) throw ConfigError("j_order must be >= 1");
  if (!(s.extrapolation_tolerance > 0.0)) throw ConfigError("extrapolation_tolerance must be > 0");
}

ComplexVector propagator_S(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                           double E, double eps, int particle, double eta) {
  if (particle != 1 && particle != 2) throw std::invalid_argument("particle must be 1 or 2");
  ComplexVector out(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const std::size_t s = particle == 1 ? basis.first(k) : basis.second(k);
    const double e = spectrum.energy(s);
    const double shift = spectrum.sign(s) == EnergySign::positive ? eta : -eta;
    const double re = particle == 1 ? 0.5 * E + eps - e : 0.5 * E - eps - e;
    out(static_cast<Eigen::Index>(k)) = 1.0 / std::complex<double>(re, shift);
  }
  return out;
}

Operator contour_integral_Finv(const TwoParticleBasis& basis,
                               const SingleParticleSpectrum& spectrum, double E) {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const std::array<PropagatorFactor, 2> f{
        PropagatorFactor{1, spectrum.energy(basis.first(k))},
        PropagatorFactor{2, spectrum.energy(basis.second(k))}};
    d(static_cast<Eigen::Index>(k)) = contour_value(E, f);
  }
  return Operator::diagonal(d);
}

Operator sandwich_integral(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                           double E, const Operator& A) {
  const std::size_t dim = basis.dim();
  if (A.dim() != dim) throw std::invalid_argument("sandwich_integral: dimension mismatch");
  Matrix X = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (A(a, b) == 0.0 && A(b, a) == 0.0) continue;
      const std::array<PropagatorFactor, 4> f{
          PropagatorFactor{1, spectrum.energy(basis.first(a))},
          PropagatorFactor{2, spectrum.energy(basis.second(a))},
          PropagatorFactor{1, spectrum.energy(basis.first(b))},
          PropagatorFactor{2, spectrum.energy(basis.second(b))}};
      const double v = contour_value(E, f);
      X(ia, ib) = A(a, b) * v;
      X(ib, ia) = A(b, a) * v;
    }
  }
  return Operator(std::move(X), false);
}

namespace {

// Evaluates one J-series term by enumerating intermediate pairs.
class ChainEvaluator {
 public:
  ChainEvaluator(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum, double E,
                 const Matrix& g, EndpointForm endpoints)
      : basis_(basis), spectrum_(spectrum), E_(E), g_(g), endpoints_(endpoints) {}

  // i Integral F^-1_a (g F^-1)^k g F^-1_b summed over intermediate pairs.
  double entry(std::size_t a, std::size_t b, int k) {
    a_ = a;
    b_ = b;
    depth_ = k;
    middle_.resize(static_cast<std::size_t>(k));
    return recurse(0, a, 1.0);
  }

 private:
  double recurse(int level, std::size_t prev, double weight) {
    if (level == depth_) {
      const double w = weight * g_(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(b_));
      if (w == 0.0) return 0.0;
      return w * integral();
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < basis_.dim(); ++c) {
      const double w = weight * g_(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(c));
      if (w == 0.0) continue;
      middle_[static_cast<std::size_t>(level)] = c;
      sum += recurse(level + 1, c, w);
    }
    return sum;
  }

  PropagatorFactor first(std::size_t pair) const {
    return {1, spectrum_.energy(basis_.first(pair))};
  }
  PropagatorFactor second(std::size_t pair) const {
    return {2, spectrum_.energy(basis_.second(pair))};
  }

  double integral() {
    std::size_t n = 0;
    // slots 0 and 1 reserved for the endpoint factors in the sum form
    buffer_[n++] = first(a_);
    buffer_[n++] = second(a_);
    for (std::size_t c : middle_) {
      buffer_[n++] = first(c);
      buffer_[n++] = second(c);
    }
    buffer_[n++] = first(b_);
    buffer_[n++] = second(b_);
    if (endpoints_ == EndpointForm::product) {
      return contour_value(E_, std::span<const PropagatorFactor>(buffer_.data(), n));
    }
    // (S1 + S2)_a ... (S1 + S2)_b: four single-factor endpoint choices.
    const std::size_t inner = n - 4;
    double sum = 0.0;
    for (int ca = 0; ca < 2; ++ca) {
      for (int cb = 0; cb < 2; ++cb) {
        std::size_t m = 0;
        scratch_[m++] = ca == 0 ? first(a_) : second(a_);
        for (std::size_t t = 0; t < inner; ++t) scratch_[m++] = buffer_[2 + t];
        scratch_[m++] = cb == 0 ? first(b_) : second(b_);
        sum += contour_value(E_, std::span<const PropagatorFactor>(scratch_.data(), m));
      }
    }
    return sum;
  }

  const TwoParticleBasis& basis_;
  const SingleParticleSpectrum& spectrum_;
  double E_;
  const Matrix& g_;
  EndpointForm endpoints_;
  std::size_t a_ = 0, b_ = 0;
  int depth_ = 0;
  std::vector<std::size_t> middle_;
  std::array<PropagatorFactor, 32> buffer_{};
  std::array<PropagatorFactor, 32> scratch_{};
};

}  // namespace

std::vector<Operator> j_series(const TwoParticleBasis& basis,
                               const SingleParticleSpectrum& spectrum, double E,
                               const Operator& g_delta, int order, EndpointForm endpoints) {
  if (order < 1) throw std::invalid_argument("j_series: order must be >= 1");
  if (2 * (order + 1) > 32) throw std::invalid_argument("j_series: order too large");
  const std::size_t dim = basis.dim();
  if (g_delta.dim() != dim) throw std::invalid_argument("j_series: dimension mismatch");

  std::vector<Operator> terms;
  terms.reserve(static_cast<std::size_t>(order));
  ChainEvaluator chain(basis, spectrum, E, g_delta.matrix(), endpoints);
  for (int k = 0; k < order; ++k) {
    Matrix X = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        X(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = chain.entry(a, b, k);
    terms.emplace_back(std::move(X), false);
  }
  return terms;
}

Operator j_series_sum(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum,
                      double E, const Operator& g_delta, int order, EndpointForm endpoints) {
  const auto terms = j_series(basis, spectrum, E, g_delta, order, endpoints);
  Matrix sum = terms.front().matrix();
  for (std::size_t k = 1; k < terms.size(); ++k) sum += terms[k].matrix();
  return Operator(std::move(sum), false);
}

}  // namespace bwlab
