#include "bwlab/model_space.hpp"

#include "bwlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bwlab {

const char* to_string(PairPattern p) {
  switch (p) {
    case PairPattern::pp: return "++";
    case PairPattern::pm: return "+-";
    case PairPattern::mp: return "-+";
    case PairPattern::mm: return "--";
  }
  return "?";
}

const char* to_string(MatrixSpec::Preset p) {
  switch (p) {
    case MatrixSpec::Preset::ones: return "ones";
    case MatrixSpec::Preset::random_symmetric: return "random-symmetric";
  }
  return "?";
}

SingleParticleSpectrum::SingleParticleSpectrum(std::vector<double> energies,
                                               std::vector<EnergySign> signs)
    : energies_(std::move(energies)), signs_(std::move(signs)) {
  if (energies_.size() != signs_.size()) {
    throw ConfigError("spectrum: energy and sign lists differ in length");
  }
  if (energies_.empty()) throw ConfigError("spectrum: no states");
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    const double e = energies_[i];
    if (!std::isfinite(e)) throw ConfigError("spectrum: non-finite energy");
    if (e == 0.0) throw ConfigError("spectrum: zero energy is not allowed");
    const bool pos = signs_[i] == EnergySign::positive;
    if (pos && e < 0.0) {
      std::ostringstream os;
      os << "spectrum: positive state has negative energy " << e;
      throw ConfigError(os.str());
    }
    if (!pos && e > 0.0) {
      std::ostringstream os;
      os << "spectrum: negative state has positive energy " << e;
      throw ConfigError(os.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (energies_[j] == e) {
        std::ostringstream os;
        os << "spectrum: duplicate energy " << e;
        throw ConfigError(os.str());
      }
    }
  }
}

double SingleParticleSpectrum::max_abs_energy() const {
  double m = 0.0;
  for (double e : energies_) m = std::max(m, std::abs(e));
  return m;
}

TwoParticleBasis::TwoParticleBasis(const SingleParticleSpectrum& spectrum) : n_(spectrum.size()) {
  patterns_.reserve(n_ * n_);
  pair_energies_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const bool pi = spectrum.sign(i) == EnergySign::positive;
      const bool pj = spectrum.sign(j) == EnergySign::positive;
      PairPattern p = pi ? (pj ? PairPattern::pp : PairPattern::pm)
                         : (pj ? PairPattern::mp : PairPattern::mm);
      patterns_.push_back(p);
      pair_energies_.push_back(spectrum.energy(i) + spectrum.energy(j));
    }
  }
}

std::size_t TwoParticleBasis::count(PairPattern p) const {
  return static_cast<std::size_t>(std::count(patterns_.begin(), patterns_.end(), p));
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Operator::Operator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("Operator: matrix is not square");
  if (hermitian_ && m_.size() > 0 && !is_symmetric(m_)) {
    throw std::invalid_argument("Operator: flagged Hermitian but not symmetric");
  }
}

bool MatrixSpec::operator==(const MatrixSpec& o) const {
  if (source.index() != o.source.index()) return false;
  if (const auto* p = std::get_if<Preset>(&source)) return *p == std::get<Preset>(o.source);
  const Matrix& a = std::get<Matrix>(source);
  const Matrix& b = std::get<Matrix>(o.source);
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

ModelConfig dirac_like_config(std::size_t count, double mass, double step) {
  ModelConfig c;
  c.positive_energies.clear();
  c.negative_energies.clear();
  for (std::size_t k = 0; k < count; ++k) {
    c.positive_energies.push_back(mass + static_cast<double>(k) * step);
    c.negative_energies.push_back(-mass - static_cast<double>(k) * step);
  }
  return c;
}

SingleParticleSpectrum build_spectrum(const ModelConfig& config) {
  if (config.positive_energies.empty()) throw ConfigError("spectrum: positive_energies is empty");
  if (config.negative_energies.empty()) throw ConfigError("spectrum: negative_energies is empty");
  std::vector<double> e;
  std::vector<EnergySign> s;
  for (double x : config.positive_energies) {
    e.push_back(x);
    s.push_back(EnergySign::positive);
  }
  for (double x : config.negative_energies) {
    e.push_back(x);
    s.push_back(EnergySign::negative);
  }
  return SingleParticleSpectrum(std::move(e), std::move(s));
}

TwoParticleBasis build_basis(const SingleParticleSpectrum& spectrum) {
  return TwoParticleBasis(spectrum);
}

namespace {

// Uniform in [-1, 1] from the raw 64-bit engine output; the standard
// distributions are implementation-defined and would break reproducibility.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

Matrix base_matrix(const MatrixSpec& spec, std::size_t dim, std::uint64_t seed,
                   InteractionKind kind) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (const auto* preset = std::get_if<MatrixSpec::Preset>(&spec.source)) {
    switch (*preset) {
      case MatrixSpec::Preset::ones:
        return Matrix::Ones(d, d);
      case MatrixSpec::Preset::random_symmetric: {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(kind)};
        std::mt19937_64 rng(seq);
        Matrix r(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index j = 0; j < d; ++j) r(i, j) = uniform_pm1(rng);
        return 0.5 * (r + r.transpose());
      }
    }
  }
  const Matrix& m = std::get<Matrix>(spec.source);
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream os;
    os << "interaction matrix is " << m.rows() << "x" << m.cols() << ", basis dimension is "
       << dim;
    throw ConfigError(os.str());
  }
  if (!is_symmetric(m)) throw ConfigError("interaction matrix is not symmetric");
  return m;
}

Operator build_interaction(const ModelConfig& config, const TwoParticleBasis& basis,
                           InteractionKind kind) {
  const InteractionSpec& spec = kind == InteractionKind::coulomb ? config.coulomb : config.delta;
  if (!(spec.scale >= 0.0)) {
    throw ConfigError(kind == InteractionKind::coulomb ? "coulomb_scale must be ≥ 0"
                                                       : "delta_scale must be ≥ 0");
  }
  Matrix m = spec.scale * base_matrix(spec.matrix, basis.dim(), config.seed, kind);
  // symmetrize exactly so the Hermitian flag holds bitwise
  m = 0.5 * (m + m.transpose()).eval();
  return Operator(std::move(m), true);
}

}  // namespace bwlab
