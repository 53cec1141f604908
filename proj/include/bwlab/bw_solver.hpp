#pragma once

// No-pair problem and the Brillouin-Wigner expansion with the
// energy-dependent reduced resolvent Q / (E - H_c).

#include "bwlab/model_space.hpp"
#include "bwlab/operators.hpp"

#include <Eigen/LU>

#include <functional>
#include <span>
#include <vector>

namespace bwlab {

/// Two-particle amplitude vector with unit norm.
class StateVector {
 public:
  StateVector() = default;
  /// Normalizes `amplitudes`; throws on a zero vector.
  explicit StateVector(Vector amplitudes);

  const Vector& amplitudes() const noexcept { return v_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(v_.size()); }

 private:
  Vector v_;
};

struct NoPairSolution {
  double energy = 0.0;  // E_c
  StateVector state;    // Psi_c, zero outside the ++ block
};

/// Diagonalizes the ++ block of H_c and returns the eigenpair at
/// `state_index` in ascending order (0 = lowest). The eigenvector sign is
/// fixed so its largest-magnitude component is positive.
NoPairSolution solve_no_pair(const Operator& H_c, const ProjectorSet& proj,
                             std::size_t state_index = 0);

/// Reduced resolvent Gamma(E) = Q (E - H_c)^-1 Q, Q = 1 - |Psi_c><Psi_c|,
/// factorized once per energy.
class Resolvent {
 public:
  /// Throws DegenerateError when E is (numerically) an eigenvalue of H_c on
  /// the Q space.
  Resolvent(const Operator& H_c, double E, const StateVector& psi_c);

  Vector apply(const Vector& v) const;
  /// Dense Gamma(E), column by column.
  Matrix matrix() const;
  double energy() const noexcept { return E_; }

 private:
  Vector project(const Vector& v) const;

  double E_;
  Vector psi_;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// One-shot convenience wrapper around Resolvent.
Vector resolvent_apply(const Operator& H_c, double E, const StateVector& psi_c, const Vector& v);

/// H_Delta(E) as a dense matrix, re-evaluated for every energy.
using PerturbationAt = std::function<Matrix(double E)>;

/// Delta E^(n) = <Psi_c| H_Delta (Gamma H_Delta)^(n-1) |Psi_c>, n = 1..order,
/// with H_Delta and Gamma both evaluated at E. order must be 1, 2 or 3.
std::vector<double> bw_terms(const Operator& H_c, const PerturbationAt& h_delta, double E,
                             const StateVector& psi_c, int order);

struct EnergyLedger {
  double E_c = 0.0;
  std::vector<double> dE;  // Delta E^(n) at the converged E
  double E = 0.0;
  double deltaE = 0.0;  // E - E_c
  int iterations = 0;
  double residual = 0.0;  // |E - (E_c + sum dE(E))|
  double damping = 1.0;   // final damping factor
};

struct BwControls {
  int order = 3;
  int max_iter = 200;
  /// Absolute tolerance; <= 0 selects 1e-12 * max(1, |E_c|).
  double tol = 0.0;

  bool operator==(const BwControls&) const = default;
};

/// Fixed-point iteration E <- (1 - w) E + w (E_c + sum_n dE^(n)(E)) from
/// E = E_c with w = 1. A trial update is accepted only if it reduces the
/// fixed-point residual; otherwise w is halved and the update retried.
/// After each accepted update w doubles again, capped at 1. Throws
/// NonConvergenceError carrying the last iterate after max_iter accepted
/// steps, or when w underflows.
///
/// `barriers` lists energies where H_Delta(E) or Gamma(E) is singular. No
/// update moves E by more than half its distance to the nearest barrier, so
/// the iteration stays in the pole-free interval around E_c.
EnergyLedger bw_selfconsistent(const Operator& H_c, const PerturbationAt& h_delta,
                               const StateVector& psi_c, double E_c, const BwControls& controls,
                               std::span<const double> barriers = {});

}  // namespace bwlab
