#pragma once

// Finite model spaces: single-particle spectra, the two-particle tensor
// basis built on them, and dense model interaction matrices.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bwlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class EnergySign : std::uint8_t { positive, negative };

/// Sign pattern of a two-particle pair (sign of particle 1, sign of particle 2).
enum class PairPattern : std::uint8_t { pp, pm, mp, mm };

const char* to_string(PairPattern p);

/// Model eigenvalues of the one-body Hamiltonians, labeled by sign.
/// Energies are nonzero, pairwise distinct, and positive iff labeled positive.
class SingleParticleSpectrum {
 public:
  SingleParticleSpectrum(std::vector<double> energies, std::vector<EnergySign> signs);

  std::size_t size() const noexcept { return energies_.size(); }
  double energy(std::size_t i) const { return energies_.at(i); }
  EnergySign sign(std::size_t i) const { return signs_.at(i); }
  const std::vector<double>& energies() const noexcept { return energies_; }
  const std::vector<EnergySign>& signs() const noexcept { return signs_; }
  double max_abs_energy() const;

  bool operator==(const SingleParticleSpectrum&) const = default;

 private:
  std::vector<double> energies_;
  std::vector<EnergySign> signs_;
};

/// Two-particle product basis. Pair (i, j) has flat index i * n + j, so the
/// second particle index runs fastest.
class TwoParticleBasis {
 public:
  explicit TwoParticleBasis(const SingleParticleSpectrum& spectrum);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return n_ * n_; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_ + j; }
  std::size_t first(std::size_t flat) const { return flat / n_; }
  std::size_t second(std::size_t flat) const { return flat % n_; }
  PairPattern pattern(std::size_t flat) const { return patterns_.at(flat); }
  /// e_i + e_j for the pair at `flat`.
  double pair_energy(std::size_t flat) const { return pair_energies_.at(flat); }
  std::size_t count(PairPattern p) const;

  bool operator==(const TwoParticleBasis&) const = default;

 private:
  std::size_t n_;
  std::vector<PairPattern> patterns_;
  std::vector<double> pair_energies_;
};

/// Dense real matrix on a two-particle basis. When flagged Hermitian the
/// matrix is checked to equal its transpose within 1e-14 (absolute,
/// scaled by the largest entry when that exceeds 1).
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m, bool hermitian = false);

  static Operator zero(std::size_t dim) { return Operator(Matrix::Zero(dim, dim), true); }
  static Operator identity(std::size_t dim) { return Operator(Matrix::Identity(dim, dim), true); }
  static Operator diagonal(const Vector& d) { return Operator(Matrix(d.asDiagonal()), true); }

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  bool hermitian() const noexcept { return hermitian_; }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  Matrix m_;
  bool hermitian_ = false;
};

bool is_symmetric(const Matrix& m, double tol = 1e-14);

enum class InteractionKind : std::uint8_t { coulomb, delta };

/// Named matrix generator or an explicit symmetric matrix.
struct MatrixSpec {
  enum class Preset : std::uint8_t { ones, random_symmetric };
  std::variant<Preset, Matrix> source = Preset::ones;

  bool operator==(const MatrixSpec& o) const;
};

const char* to_string(MatrixSpec::Preset p);

struct InteractionSpec {
  double scale = 0.0;
  MatrixSpec matrix;

  bool operator==(const InteractionSpec&) const = default;
};

struct ModelConfig {
  std::vector<double> positive_energies{1.0};
  std::vector<double> negative_energies{-1.2};
  InteractionSpec coulomb{0.1, {}};
  InteractionSpec delta{0.05, {}};
  std::uint64_t seed = 7;

  bool operator==(const ModelConfig&) const = default;
};

/// Dirac-like preset: positives m + k*step, negatives -m - k*step, k = 0..count-1.
ModelConfig dirac_like_config(std::size_t count, double mass = 1.0, double step = 0.5);

SingleParticleSpectrum build_spectrum(const ModelConfig& config);
TwoParticleBasis build_basis(const SingleParticleSpectrum& spectrum);

/// scale * M for the configured base matrix M of the requested interaction.
Operator build_interaction(const ModelConfig& config, const TwoParticleBasis& basis,
                           InteractionKind kind);

/// Base (unscaled) matrix of a spec; exposed for tests.
Matrix base_matrix(const MatrixSpec& spec, std::size_t dim, std::uint64_t seed,
                   InteractionKind kind);

}  // namespace bwlab
