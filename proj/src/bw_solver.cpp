#include "bwlab/bw_solver.hpp"

#include "bwlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace bwlab {

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  const double n = v_.norm();
  if (!(n > 0.0)) throw std::invalid_argument("StateVector: zero vector");
  v_ /= n;
}

NoPairSolution solve_no_pair(const Operator& H_c, const ProjectorSet& proj,
                             std::size_t state_index) {
  const Matrix& P = proj.pp.matrix();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < P.rows(); ++k)
    if (P(k, k) == 1.0) idx.push_back(k);
  if (idx.empty()) throw ConfigError("no-pair problem: the ++ subspace is empty");
  if (state_index >= idx.size()) {
    std::ostringstream os;
    os << "state_index " << state_index << " exceeds the ++ block size " << idx.size();
    throw ConfigError(os.str());
  }

  const auto m = static_cast<Eigen::Index>(idx.size());
  Matrix block(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) block(r, c) = H_c.matrix()(idx[r], idx[c]);

  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  if (es.info() != Eigen::Success) throw DegenerateError("no-pair eigensolve failed");
  const auto s = static_cast<Eigen::Index>(state_index);
  Vector local = es.eigenvectors().col(s);
  Eigen::Index big = 0;
  local.cwiseAbs().maxCoeff(&big);
  if (local(big) < 0.0) local = -local;

  Vector full = Vector::Zero(P.rows());
  for (Eigen::Index r = 0; r < m; ++r) full(idx[r]) = local(r);
  return {es.eigenvalues()(s), StateVector(std::move(full))};
}

Resolvent::Resolvent(const Operator& H_c, double E, const StateVector& psi_c)
    : E_(E), psi_(psi_c.amplitudes()) {
  const auto d = static_cast<Eigen::Index>(H_c.dim());
  if (psi_.size() != d) throw std::invalid_argument("Resolvent: dimension mismatch");
  const Matrix P = psi_ * psi_.transpose();
  const Matrix Q = Matrix::Identity(d, d) - P;
  // Q (E - H_c) Q + P is invertible iff E is not a Q-space eigenvalue.
  const Matrix M = Q * (E * Matrix::Identity(d, d) - H_c.matrix()) * Q + P;
  lu_.compute(M);
  // rcond() alone misses exactly singular input (zero pivots give inf norms)
  const Vector pivots = lu_.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() / std::max(pivots.maxCoeff(), 1e-300);
  const double rcond = std::min(lu_.rcond(), pivot_ratio);
  if (!(rcond > 1e-13)) {
    std::ostringstream os;
    os << "degenerate denominator: resolvent singular at E = " << E << " (rcond " << rcond << ")";
    throw DegenerateError(os.str());
  }
}

Vector Resolvent::project(const Vector& v) const { return v - psi_ * psi_.dot(v); }

Vector Resolvent::apply(const Vector& v) const { return project(lu_.solve(project(v))); }

Matrix Resolvent::matrix() const {
  const Eigen::Index d = psi_.size();
  Matrix G(d, d);
  for (Eigen::Index c = 0; c < d; ++c) G.col(c) = apply(Vector::Unit(d, c));
  return G;
}

Vector resolvent_apply(const Operator& H_c, double E, const StateVector& psi_c, const Vector& v) {
  return Resolvent(H_c, E, psi_c).apply(v);
}

std::vector<double> bw_terms(const Operator& H_c, const PerturbationAt& h_delta, double E,
                             const StateVector& psi_c, int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("bw_terms: only orders 1, 2 and 3 are supported");
  }
  const Matrix H = h_delta(E);
  const Vector& psi = psi_c.amplitudes();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(order));
  Vector chain = H * psi;  // H (Gamma H)^(n-1) |psi>
  terms.push_back(psi.dot(chain));
  if (order == 1) return terms;
  const Resolvent gamma(H_c, E, psi_c);
  for (int n = 2; n <= order; ++n) {
    chain = H * gamma.apply(chain);
    terms.push_back(psi.dot(chain));
  }
  return terms;
}

EnergyLedger bw_selfconsistent(const Operator& H_c, const PerturbationAt& h_delta,
                               const StateVector& psi_c, double E_c, const BwControls& controls,
                               std::span<const double> barriers) {
  if (controls.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  const double tol = controls.tol > 0.0 ? controls.tol : 1e-12 * std::max(1.0, std::abs(E_c));
  auto reach = [&](double E) {
    double r = std::numeric_limits<double>::infinity();
    for (double b : barriers) r = std::min(r, 0.5 * std::abs(E - b));
    return r;
  };
  constexpr double kMinDamping = 0x1.0p-52;

  struct Point {
    double E;
    std::vector<double> dE;
    double step;  // E_c + sum dE(E) - E
  };
  auto evaluate = [&](double E) {
    Point p{E, bw_terms(H_c, h_delta, E, psi_c, controls.order), 0.0};
    double sum = 0.0;
    for (double x : p.dE) sum += x;
    p.step = E_c + sum - E;
    return p;
  };

  Point cur = evaluate(E_c);
  if (!std::isfinite(cur.step)) {
    throw NonConvergenceError("BW iteration produced a non-finite energy", E_c, 1);
  }
  double w = 1.0;
  for (int it = 1; it <= controls.max_iter; ++it) {
    if (std::abs(cur.step) <= tol) {
      EnergyLedger ledger;
      ledger.E_c = E_c;
      ledger.dE = std::move(cur.dE);
      ledger.E = cur.E;
      ledger.deltaE = cur.E - E_c;
      ledger.iterations = it;
      ledger.residual = std::abs(cur.step);
      ledger.damping = w;
      return ledger;
    }
    // Damped update; w is halved until the fixed-point residual shrinks
    // enough and doubled (up to 1) after every accepted step.
    for (;;) {
      double move = w * cur.step;
      const double r = reach(cur.E);
      if (std::abs(move) > r) move = std::copysign(r, move);
      const double trial = cur.E + move;
      std::optional<Point> next;
      try {
        next = evaluate(trial);
      } catch (const DegenerateError&) {
        next.reset();
      }
      // sufficient decrease relative to the fraction of the step taken
      const double taken = std::abs(move / cur.step);
      if (next && std::isfinite(next->step) &&
          std::abs(next->step) <= (1.0 - 0.5 * taken) * std::abs(cur.step)) {
        cur = std::move(*next);
        w = std::min(1.0, 2.0 * w);
        break;
      }
      w *= 0.5;
      if (w < kMinDamping) {
        std::ostringstream os;
        os << "BW self-consistency stalled at E = " << cur.E << " (residual " << cur.step << ")";
        throw NonConvergenceError(os.str(), cur.E, it);
      }
    }
  }
  std::ostringstream os;
  os << "BW self-consistency did not converge after " << controls.max_iter
     << " iterations (last E = " << cur.E << ")";
  throw NonConvergenceError(os.str(), cur.E, controls.max_iter);
}

}  // namespace bwlab
