#pragma once

// The first- and second-order energy expressions whose combination carries
// either (Ic + dE) or (Ic - dE), evaluated independently so the sign of the
// dE term can be checked numerically.
//
// Notation used throughout:
//   X(E) = i Integral d(eps)/(2 pi) F^-1 J F^-1   (J truncated at j_order)
//   Y(E) = X(E) Ic                                (the common sandwich factor)
//   H_Delta2(E) = D(E) Y(E)

#include "bwlab/bw_solver.hpp"
#include "bwlab/model_space.hpp"
#include "bwlab/operators.hpp"
#include "bwlab/power_fit.hpp"
#include "bwlab/propagators.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwlab {

/// Everything that depends only on the configuration, built once.
struct ModelProblem {
  ModelConfig config;
  SingleParticleSpectrum spectrum;
  TwoParticleBasis basis;
  ProjectorSet proj;
  Operator coulomb;  // Ic
  Operator delta;    // g_Delta
  Operator H_c;
  Operator H_delta1;
  NoPairSolution no_pair;
};

ModelProblem build_problem(const ModelConfig& config, std::size_t state_index = 0);

/// H_Delta1 + D(E) X(E) Ic, rebuilt for each requested energy.
PerturbationAt h_delta_at(const ModelProblem& problem, const IntegrationSettings& settings);

/// Energies where H_Delta(E) or Gamma(E) is singular: every pair energy and
/// every eigenvalue of H_c other than E_c.
std::vector<double> bw_barriers(const ModelProblem& problem);

/// bw_selfconsistent on the problem's H_c, Psi_c and barriers.
EnergyLedger solve_bw(const ModelProblem& problem, const IntegrationSettings& settings,
                      const BwControls& controls);

enum class Convention { lindgren, dkz, dkz_dc_approx };

const char* to_string(Convention c);

struct E2bEvaluation {
  double reduced = 0.0;     // <Psi_c|(Ic - D_c) Y|Psi_c>
  double gamma_form = 0.0;  // <Psi_c|H_Delta1 Gamma(E) H_Delta2(E)|Psi_c>
  double residual = 0.0;    // |gamma_form - reduced| / max(|reduced|, tiny)
};

struct Dm1Route {
  double combined = 0.0;   // <(Ic + dE) Y_route>, Y_route = Dinv W Dinv Ic
  double predicted = 0.0;  // 2 dE <Y_route>
  double residual = 0.0;   // relative deviation from the direct evaluations
};

/// Sandwich factors at one energy, shared by every expression below.
class ControversyEvaluator {
 public:
  ControversyEvaluator(const ModelProblem& problem, double E, const IntegrationSettings& settings);

  double energy() const noexcept { return E_; }
  const Matrix& Y() const noexcept { return Y_; }
  /// <Psi_c|Y|Psi_c>
  double sandwich_expectation() const;

  /// <Psi_c| D Y |Psi_c>
  double delta_e1() const;
  E2bEvaluation delta_e2b() const;
  /// <Psi_c|(Ic + dE) Y|Psi_c> for lindgren, (Ic - dE) for dkz. The
  /// dkz_dc_approx convention evaluates the transformed (S1 + S2) route with
  /// every D replaced by D_c.
  double combined(Convention c, double deltaE) const;
  /// 2 dE <Psi_c|Y|Psi_c>
  double predicted(double deltaE) const;
  /// Transformed route D^-1 = D_c^-1 - dE/(D_c D) applied to
  /// (S1 + S2) J (S1 + S2).
  Dm1Route dm1_route(double deltaE) const;

 private:
  const Matrix& route_W() const;

  const ModelProblem& problem_;
  const IntegrationSettings& settings_;
  double E_;
  Matrix D_, Dc_, Y_;
  mutable std::optional<Matrix> W_;
};

double deltaE1_direct(const ModelProblem& problem, double E, const IntegrationSettings& settings);
E2bEvaluation deltaE2b_direct(const ModelProblem& problem, double E,
                              const IntegrationSettings& settings);
double combined_variant(const ModelProblem& problem, double E, double deltaE,
                        const IntegrationSettings& settings, Convention convention);
double predicted_discrepancy(const ModelProblem& problem, double E, double deltaE,
                             const IntegrationSettings& settings);

struct OracleResult {
  double energy = 0.0;
  double overlap = 0.0;  // |<Psi_c|Psi_oracle>|^2
};

/// Lowest-connected eigenvalue of h1 + h2 + (Lpp - Lmm)(Ic + g_Delta), picked
/// by maximal overlap with Psi_c. Throws DegenerateError if that overlap is
/// below 0.5 or the eigenvalue is complex.
OracleResult model_oracle(const ModelProblem& problem);

struct ControversyReport {
  double E = 0.0;
  double deltaE = 0.0;
  double dE1_direct = 0.0;
  double dE2b_direct = 0.0;
  double dE2b_gamma_form = 0.0;
  double sandwich_expectation = 0.0;
  double combined_lindgren = 0.0;
  double combined_dkz = 0.0;
  double combined_dkz_dc_approx = 0.0;
  double difference = 0.0;
  double predicted_difference = 0.0;
  std::map<std::string, double> identity_residuals;
};

/// Evaluates all expressions at the converged energy of `ledger`.
ControversyReport evaluate_controversy(const ModelProblem& problem, const EnergyLedger& ledger,
                                       const IntegrationSettings& settings);

struct PipelineResult {
  EnergyLedger ledger;
  ControversyReport report;
  OracleResult oracle;
};

/// No-pair solve (already in `problem`), BW self-consistency, both
/// conventions, and the model oracle.
PipelineResult run_pipeline(const ModelProblem& problem, const IntegrationSettings& settings,
                            const BwControls& controls);

struct ScanRow {
  double lambda = 0.0;
  double difference = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  bool ok = false;
  std::string error;
  /// "degenerate", "nonconvergence", "config_error" or "error" when !ok
  std::string failure_kind;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::optional<PowerLawFit> fit;
  bool complete = false;  // every row succeeded
};

/// Geometric schedule from `from` to `to` with `points` entries.
std::vector<double> geometric_schedule(double from, double to, int points);

/// For each lambda, scales both couplings of `config` by lambda, runs the
/// full pipeline and records 2 dE <Y> and the measured difference. Fits
/// log|difference| against log lambda over the successful rows.
ScanResult coupling_scan(const ModelConfig& config, std::span<const double> schedule,
                         const IntegrationSettings& settings, const BwControls& controls,
                         std::size_t state_index = 0);

}  // namespace bwlab
