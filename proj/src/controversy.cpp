#include "bwlab/controversy.hpp"

#include "bwlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <sstream>

namespace bwlab {

namespace {

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

double expectation(const Vector& psi, const Matrix& A) { return psi.dot(A * psi); }

}  // namespace

ModelProblem build_problem(const ModelConfig& config, std::size_t state_index) {
  SingleParticleSpectrum spectrum = build_spectrum(config);
  TwoParticleBasis basis = build_basis(spectrum);
  ProjectorSet proj = projectors(basis);
  Operator Ic = build_interaction(config, basis, InteractionKind::coulomb);
  Operator g = build_interaction(config, basis, InteractionKind::delta);
  Operator Hc = build_Hc(basis, proj, Ic);
  Operator Hd1 = build_HDelta1(proj, Ic);
  NoPairSolution np = solve_no_pair(Hc, proj, state_index);
  return ModelProblem{config,          std::move(spectrum), std::move(basis),
                      std::move(proj), std::move(Ic),       std::move(g),
                      std::move(Hc),   std::move(Hd1),      std::move(np)};
}

PerturbationAt h_delta_at(const ModelProblem& problem, const IntegrationSettings& settings) {
  return [&problem, settings](double E) -> Matrix {
    const Operator X = j_series_sum(problem.basis, problem.spectrum, E, problem.delta,
                                    settings.j_order);
    const Matrix D = build_D(problem.basis, E).matrix();
    return problem.H_delta1.matrix() + D * X.matrix() * problem.coulomb.matrix();
  };
}

std::vector<double> bw_barriers(const ModelProblem& problem) {
  std::vector<double> b;
  for (std::size_t k = 0; k < problem.basis.dim(); ++k) b.push_back(problem.basis.pair_energy(k));
  Eigen::SelfAdjointEigenSolver<Matrix> es(problem.H_c.matrix(), Eigen::EigenvaluesOnly);
  const double Ec = problem.no_pair.energy;
  bool skipped = false;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double x = es.eigenvalues()(k);
    if (!skipped && std::abs(x - Ec) <= 1e-12 * std::max(1.0, std::abs(Ec))) {
      skipped = true;
      continue;
    }
    b.push_back(x);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

EnergyLedger solve_bw(const ModelProblem& problem, const IntegrationSettings& settings,
                      const BwControls& controls) {
  const std::vector<double> barriers = bw_barriers(problem);
  return bw_selfconsistent(problem.H_c, h_delta_at(problem, settings), problem.no_pair.state,
                           problem.no_pair.energy, controls, barriers);
}

const char* to_string(Convention c) {
  switch (c) {
    case Convention::lindgren: return "lindgren";
    case Convention::dkz: return "dkz";
    case Convention::dkz_dc_approx: return "dkz-dc-approx";
  }
  return "?";
}

ControversyEvaluator::ControversyEvaluator(const ModelProblem& problem, double E,
                                           const IntegrationSettings& settings)
    : problem_(problem), settings_(settings), E_(E) {
  D_ = build_D(problem.basis, E).matrix();
  Dc_ = build_Dc(problem.basis, problem.no_pair.energy).matrix();
  const Operator X =
      j_series_sum(problem.basis, problem.spectrum, E, problem.delta, settings.j_order);
  Y_ = X.matrix() * problem.coulomb.matrix();
}

double ControversyEvaluator::sandwich_expectation() const {
  return expectation(problem_.no_pair.state.amplitudes(), Y_);
}

double ControversyEvaluator::delta_e1() const {
  return expectation(problem_.no_pair.state.amplitudes(), D_ * Y_);
}

E2bEvaluation ControversyEvaluator::delta_e2b() const {
  const Vector& psi = problem_.no_pair.state.amplitudes();
  E2bEvaluation out;
  out.reduced = expectation(psi, (problem_.coulomb.matrix() - Dc_) * Y_);

  const Resolvent gamma(problem_.H_c, E_, problem_.no_pair.state);
  const Vector h2psi = D_ * (Y_ * psi);
  out.gamma_form = psi.dot(problem_.H_delta1.matrix() * gamma.apply(h2psi));
  out.residual = relative_gap(out.gamma_form, out.reduced);
  return out;
}

const Matrix& ControversyEvaluator::route_W() const {
  if (!W_) {
    W_ = j_series_sum(problem_.basis, problem_.spectrum, E_, problem_.delta, settings_.j_order,
                      EndpointForm::sum)
             .matrix();
  }
  return *W_;
}

double ControversyEvaluator::combined(Convention c, double deltaE) const {
  const Vector& psi = problem_.no_pair.state.amplitudes();
  const Matrix& Ic = problem_.coulomb.matrix();
  const auto d = static_cast<Eigen::Index>(problem_.basis.dim());
  switch (c) {
    case Convention::lindgren:
      return expectation(psi, (Ic + deltaE * Matrix::Identity(d, d)) * Y_);
    case Convention::dkz:
      return expectation(psi, (Ic - deltaE * Matrix::Identity(d, d)) * Y_);
    case Convention::dkz_dc_approx: {
      // D -> D_c inside the transform: D D^-1 W D^-1 Ic becomes W D_c^-1 Ic in
      // the first-order piece and (Ic - D_c) D_c^-1 W D_c^-1 Ic in the second.
      const Matrix Dci = invert_diagonal(Operator(Dc_, true)).matrix();
      const Matrix& W = route_W();
      const Matrix tail = W * Dci * Ic;
      return expectation(psi, tail) + expectation(psi, (Ic - Dc_) * Dci * tail);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ControversyEvaluator::predicted(double deltaE) const {
  return 2.0 * deltaE * sandwich_expectation();
}

Dm1Route ControversyEvaluator::dm1_route(double deltaE) const {
  const Vector& psi = problem_.no_pair.state.amplitudes();
  const Matrix& Ic = problem_.coulomb.matrix();
  const auto d = static_cast<Eigen::Index>(problem_.basis.dim());
  const Vector Dci = invert_diagonal(Operator(Dc_, true)).matrix().diagonal();
  const Vector Di = invert_diagonal(Operator(D_, true)).matrix().diagonal();
  const Vector Dinv = Dci - deltaE * Dci.cwiseProduct(Di);
  const Matrix Yr = Dinv.asDiagonal() * route_W() * Dinv.asDiagonal() * Ic;

  Dm1Route out;
  out.combined = expectation(psi, (Ic + deltaE * Matrix::Identity(d, d)) * Yr);
  out.predicted = 2.0 * deltaE * expectation(psi, Yr);
  out.residual = std::max(relative_gap(out.combined, combined(Convention::lindgren, deltaE)),
                          relative_gap(out.predicted, predicted(deltaE)));
  return out;
}

double deltaE1_direct(const ModelProblem& problem, double E, const IntegrationSettings& settings) {
  return ControversyEvaluator(problem, E, settings).delta_e1();
}

E2bEvaluation deltaE2b_direct(const ModelProblem& problem, double E,
                              const IntegrationSettings& settings) {
  return ControversyEvaluator(problem, E, settings).delta_e2b();
}

double combined_variant(const ModelProblem& problem, double E, double deltaE,
                        const IntegrationSettings& settings, Convention convention) {
  return ControversyEvaluator(problem, E, settings).combined(convention, deltaE);
}

double predicted_discrepancy(const ModelProblem& problem, double E, double deltaE,
                             const IntegrationSettings& settings) {
  return ControversyEvaluator(problem, E, settings).predicted(deltaE);
}

OracleResult model_oracle(const ModelProblem& problem) {
  const auto d = static_cast<Eigen::Index>(problem.basis.dim());
  Vector h(d);
  for (Eigen::Index k = 0; k < d; ++k) h(k) = problem.basis.pair_energy(static_cast<std::size_t>(k));
  const Matrix sgn = problem.proj.pp.matrix() - problem.proj.mm.matrix();
  const Matrix H =
      Matrix(h.asDiagonal()) + sgn * (problem.coulomb.matrix() + problem.delta.matrix());

  Eigen::EigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw DegenerateError("model oracle: eigensolve failed");
  const Vector& psi = problem.no_pair.state.amplitudes();
  Eigen::Index best = -1;
  double best_overlap = -1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) continue;
    const double ov = std::norm(psi.cast<std::complex<double>>().dot(v)) / n2;
    if (ov > best_overlap) {
      best_overlap = ov;
      best = k;
    }
  }
  if (best < 0 || best_overlap < 0.5) {
    std::ostringstream os;
    os << "model oracle: overlap tracking ambiguous (max overlap " << best_overlap << ")";
    throw DegenerateError(os.str());
  }
  const std::complex<double> lam = es.eigenvalues()(best);
  if (std::abs(lam.imag()) > 1e-12 * std::max(1.0, std::abs(lam.real()))) {
    throw DegenerateError("model oracle: tracked eigenvalue is complex");
  }
  return {lam.real(), best_overlap};
}

ControversyReport evaluate_controversy(const ModelProblem& problem, const EnergyLedger& ledger,
                                       const IntegrationSettings& settings) {
  const ControversyEvaluator ev(problem, ledger.E, settings);
  ControversyReport r;
  r.E = ledger.E;
  r.deltaE = ledger.deltaE;
  r.dE1_direct = ev.delta_e1();
  const E2bEvaluation e2b = ev.delta_e2b();
  r.dE2b_direct = e2b.reduced;
  r.dE2b_gamma_form = e2b.gamma_form;
  r.sandwich_expectation = ev.sandwich_expectation();
  r.combined_lindgren = ev.combined(Convention::lindgren, r.deltaE);
  r.combined_dkz = ev.combined(Convention::dkz, r.deltaE);
  r.combined_dkz_dc_approx = ev.combined(Convention::dkz_dc_approx, r.deltaE);
  r.difference = r.combined_lindgren - r.combined_dkz;
  r.predicted_difference = ev.predicted(r.deltaE);

  const double scale = std::max(1.0, std::abs(r.combined_lindgren));
  r.identity_residuals["E2b_vs_E2b2"] = e2b.residual;
  r.identity_residuals["Dm1_route"] = ev.dm1_route(r.deltaE).residual;
  r.identity_residuals["central_claim"] =
      std::abs(r.difference - r.predicted_difference) / scale;
  r.identity_residuals["chain_consistency"] =
      relative_gap(r.dE1_direct + r.dE2b_direct, r.combined_lindgren);
  const double forced =
      ev.combined(Convention::lindgren, 0.0) - ev.combined(Convention::dkz, 0.0);
  r.identity_residuals["forced_zero_deltaE"] = std::abs(forced) / scale;
  return r;
}

PipelineResult run_pipeline(const ModelProblem& problem, const IntegrationSettings& settings,
                            const BwControls& controls) {
  PipelineResult out;
  out.ledger = solve_bw(problem, settings, controls);
  out.report = evaluate_controversy(problem, out.ledger, settings);
  out.oracle = model_oracle(problem);
  return out;
}

std::vector<double> geometric_schedule(double from, double to, int points) {
  if (!(from > 0.0) || !(to > 0.0)) throw ConfigError("scan bounds must be > 0");
  if (points < 1) throw ConfigError("scan-points must be >= 1");
  std::vector<double> s(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    s[static_cast<std::size_t>(k)] =
        points == 1 ? from : from * std::pow(to / from, static_cast<double>(k) / (points - 1));
  }
  if (points > 1) s.back() = to;
  return s;
}

namespace {

ScanRow scan_point(const ModelConfig& base, double lambda, const IntegrationSettings& settings,
                   const BwControls& controls, std::size_t state_index) {
  ScanRow row;
  row.lambda = lambda;
  try {
    ModelConfig cfg = base;
    cfg.coulomb.scale *= lambda;
    cfg.delta.scale *= lambda;
    const ModelProblem problem = build_problem(cfg, state_index);
    const EnergyLedger ledger =
        solve_bw(problem, settings, controls);
    const ControversyReport rep = evaluate_controversy(problem, ledger, settings);
    row.difference = rep.difference;
    row.predicted = rep.predicted_difference;
    if (row.predicted != 0.0) {
      row.ratio = row.difference / row.predicted;
    } else {
      row.ratio = row.difference == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    }
    row.ok = true;
  } catch (const DegenerateError& e) {
    row.error = e.what();
    row.failure_kind = "degenerate";
  } catch (const NonConvergenceError& e) {
    row.error = e.what();
    row.failure_kind = "nonconvergence";
  } catch (const ConfigError& e) {
    row.error = e.what();
    row.failure_kind = "config_error";
  } catch (const std::exception& e) {
    row.error = e.what();
    row.failure_kind = "error";
  }
  return row;
}

}  // namespace

ScanResult coupling_scan(const ModelConfig& config, std::span<const double> schedule,
                         const IntegrationSettings& settings, const BwControls& controls,
                         std::size_t state_index) {
  if (schedule.size() < 4) throw ConfigError("scan requires ≥ 4 points");
  for (double l : schedule) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("scan lambdas must be finite and > 0");
  }
  const double r0 = schedule[1] / schedule[0];
  for (std::size_t k = 2; k < schedule.size(); ++k) {
    if (std::abs(schedule[k] / schedule[k - 1] - r0) > 1e-9 * std::abs(r0)) {
      throw ConfigError("scan schedule must be geometric");
    }
  }
  validate(settings);

  std::vector<std::future<ScanRow>> jobs;
  jobs.reserve(schedule.size());
  for (double l : schedule) {
    jobs.push_back(std::async(std::launch::async, scan_point, std::cref(config), l,
                              std::cref(settings), std::cref(controls), state_index));
  }
  ScanResult out;
  out.complete = true;
  for (auto& j : jobs) {
    out.rows.push_back(j.get());
    if (!out.rows.back().ok) out.complete = false;
  }

  std::vector<double> x, y;
  for (const ScanRow& r : out.rows) {
    if (!r.ok) continue;
    x.push_back(r.lambda);
    y.push_back(r.difference);
  }
  try {
    out.fit = fit_power_law(x, y);
  } catch (const std::invalid_argument&) {
    out.fit.reset();
  }
  return out;
}

}  // namespace bwlab
