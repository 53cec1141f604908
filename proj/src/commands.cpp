#include "bwlab/commands.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace bwlab {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

class Timer {
 public:
  Timer(RunReport& r, std::string stage) : r_(r), stage_(std::move(stage)), t0_(Clock::now()) {}
  ~Timer() {
    const std::chrono::duration<double, std::milli> dt = Clock::now() - t0_;
    r_.timings_ms.emplace_back(stage_, dt.count());
  }

 private:
  RunReport& r_;
  std::string stage_;
  Clock::time_point t0_;
};

// Records one identity. A DegenerateError marks the row "degenerate" and
// remembers the message for the report.
void check(RunReport& r, std::string& degenerate_msg, const std::string& name, double tol,
           const std::function<double()>& f) {
  IdentityRow row;
  row.name = name;
  row.tolerance = tol;
  try {
    row.residual = f();
    row.status = row.residual <= tol ? "ok" : "fail";
  } catch (const DegenerateError& e) {
    row.residual = kNaN;
    row.status = "degenerate";
    if (degenerate_msg.empty()) degenerate_msg = name + ": " + e.what();
  }
  r.identities.push_back(std::move(row));
}

CommandResult finish_with(RunReport report, const char* status, int code, std::string stage,
                          std::string message) {
  report.status = status;
  report.failure = FailureInfo{std::move(stage), std::move(message)};
  return {std::move(report), code};
}

// Runs `body`, mapping the library's exception types to exit codes with the
// stage that was active when it threw.
CommandResult guarded(RunReport report, const std::function<int(RunReport&, std::string&)>& body) {
  std::string stage = "config";
  try {
    const int code = body(report, stage);
    return {std::move(report), code};
  } catch (const ConfigError& e) {
    return finish_with(std::move(report), "config_error", kExitConfig, stage, e.what());
  } catch (const DegenerateError& e) {
    return finish_with(std::move(report), "degenerate", kExitDegenerate, stage, e.what());
  } catch (const NonConvergenceError& e) {
    return finish_with(std::move(report), "nonconvergence", kExitNonConvergence, stage, e.what());
  }
}

void controversy_rows(RunReport& r, std::string& deg, const std::map<std::string, double>& res) {
  static const std::map<std::string, double> tol{
      {"E2b_vs_E2b2", 1e-10},  {"chain_consistency", 1e-10}, {"central_claim", 1e-12},
      {"Dm1_route", 1e-8},     {"forced_zero_deltaE", 0.0},
  };
  for (const auto& [name, t] : tol) {
    const auto it = res.find(name);
    check(r, deg, name, t, [&] { return it->second; });
  }
}

}  // namespace

double verify_probe_shift(double E_c) { return 1e-3 * std::max(1.0, std::abs(E_c)); }

CommandResult cmd_verify(const RunConfig& config) {
  RunReport report;
  report.command = "verify";
  report.config_text = emit_config(config);
  return guarded(std::move(report), [&](RunReport& r, std::string& stage) {
    validate(config);
    stage = "no_pair";
    const ModelProblem problem = [&] {
      Timer t(r, "no_pair");
      return build_problem(config.model, config.state_index);
    }();
    const double Ec = problem.no_pair.energy;
    const TwoParticleBasis& basis = problem.basis;
    const auto d = static_cast<Eigen::Index>(basis.dim());

    stage = "identities";
    Timer t(r, "identities");
    std::string deg;

    check(r, deg, "contour_Finv", 1e-12, [&] {
      const Matrix G0 = build_G0(basis, Ec).matrix();
      const Matrix C = contour_integral_Finv(basis, problem.spectrum, Ec).matrix();
      return max_abs(C - G0) / std::max(1.0, max_abs(G0));
    });
    check(r, deg, "contour_vs_quadrature", 1e-6, [&] {
      const Matrix C = contour_integral_Finv(basis, problem.spectrum, Ec).matrix();
      const QuadratureResult q = quadrature_oracle_Finv(basis, problem.spectrum, Ec, config.integration);
      return max_abs(q.real.matrix() - C) / std::max(max_abs(C), 1e-300);
    });
    check(r, deg, "G0mod", 1e-12, [&] {
      const Matrix D = build_D(basis, Ec).matrix();
      for (Eigen::Index k = 0; k < d; ++k) {
        if (std::abs(D(k, k)) < kDegenerateThreshold) {
          throw DegenerateError("degenerate denominator: D vanishes at E_c on pair " +
                                std::to_string(k));
        }
      }
      double worst = 0.0;
      for (double eps : {-1.37, -0.41, 0.0, 0.23, 0.88, 2.71}) {
        const ComplexVector s1 = propagator_S(basis, problem.spectrum, Ec, eps, 1, 0.0);
        const ComplexVector s2 = propagator_S(basis, problem.spectrum, Ec, eps, 2, 0.0);
        for (Eigen::Index k = 0; k < d; ++k) {
          const std::complex<double> f = s1(k) * s2(k);
          const std::complex<double> g = (s1(k) + s2(k)) / D(k, k);
          if (!std::isfinite(std::abs(f))) continue;  // eps sits on a pole
          worst = std::max(worst, std::abs(f - g) / std::max(std::abs(f), 1e-300));
        }
      }
      return worst;
    });
    check(r, deg, "LmmGammaD", 1e-12, [&] {
      const Resolvent gamma(problem.H_c, Ec, problem.no_pair.state);
      const Matrix lhs = problem.proj.mm.matrix() * gamma.matrix() * build_D(basis, Ec).matrix();
      return max_abs(lhs - problem.proj.mm.matrix());
    });
    check(r, deg, "resolvent_orthogonality", 1e-12, [&] {
      const Resolvent gamma(problem.H_c, Ec, problem.no_pair.state);
      const Vector v = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
      const Vector g = gamma.apply(v);
      return std::abs(problem.no_pair.state.amplitudes().dot(g)) / std::max(1.0, g.norm());
    });

    const double shift = verify_probe_shift(Ec);
    const double Ep = Ec + shift;
    check(r, deg, "Dm1_operator", 1e-13, [&] {
      const Vector Di = invert_diagonal(build_D(basis, Ep)).matrix().diagonal();
      const Vector Dci = invert_diagonal(build_Dc(basis, Ec)).matrix().diagonal();
      const double dE = Ep - Ec;
      const Vector rhs = Dci - dE * Dci.cwiseProduct(Di);
      return (rhs - Di).cwiseAbs().maxCoeff() / std::max(1.0, Di.cwiseAbs().maxCoeff());
    });

    const double dE = Ep - Ec;
    std::optional<ControversyEvaluator> ev;
    std::string ev_error;
    try {
      ev.emplace(problem, Ep, config.integration);
    } catch (const DegenerateError& e) {
      ev_error = e.what();
    }
    auto evaluator = [&]() -> const ControversyEvaluator& {
      if (!ev) throw DegenerateError(ev_error);
      return *ev;
    };
    check(r, deg, "E2b_vs_E2b2", 1e-10, [&] { return evaluator().delta_e2b().residual; });
    check(r, deg, "chain_consistency", 1e-10, [&] {
      const ControversyEvaluator& e = evaluator();
      return rel_gap(e.delta_e1() + e.delta_e2b().reduced, e.combined(Convention::lindgren, dE));
    });
    check(r, deg, "central_claim", 1e-12, [&] {
      const ControversyEvaluator& e = evaluator();
      const double L = e.combined(Convention::lindgren, dE);
      const double K = e.combined(Convention::dkz, dE);
      return std::abs(L - K - e.predicted(dE)) / std::max(1.0, std::abs(L));
    });
    check(r, deg, "Dm1_route", 1e-8, [&] { return evaluator().dm1_route(dE).residual; });
    check(r, deg, "forced_zero_deltaE", 0.0, [&] {
      const ControversyEvaluator& e = evaluator();
      return std::abs(e.combined(Convention::lindgren, 0.0) - e.combined(Convention::dkz, 0.0));
    });

    bool failed = false;
    for (const IdentityRow& row : r.identities) failed = failed || row.status == "fail";
    if (!deg.empty()) {
      r.status = "degenerate";
      r.failure = FailureInfo{"identities", deg};
      return static_cast<int>(kExitDegenerate);
    }
    if (failed) {
      r.status = "identity_failure";
      return static_cast<int>(kExitIdentity);
    }
    return static_cast<int>(kExitOk);
  });
}

CommandResult cmd_compare(const RunConfig& config) {
  RunReport report;
  report.command = "compare";
  report.config_text = emit_config(config);
  return guarded(std::move(report), [&](RunReport& r, std::string& stage) {
    validate(config);
    stage = "no_pair";
    const ModelProblem problem = [&] {
      Timer t(r, "no_pair");
      return build_problem(config.model, config.state_index);
    }();

    stage = "bw";
    {
      Timer t(r, "bw");
      r.ledger = solve_bw(problem, config.integration, config.bw);
    }
    stage = "controversy";
    {
      Timer t(r, "controversy");
      r.controversy = evaluate_controversy(problem, *r.ledger, config.integration);
    }
    std::string deg;
    controversy_rows(r, deg, r.controversy->identity_residuals);
    check(r, deg, "difference_vs_predicted", 1e-8, [&] {
      const double diff = r.controversy->difference;
      const double pred = r.controversy->predicted_difference;
      if (diff == 0.0) return pred == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      return std::abs(diff - pred) / std::abs(diff);
    });

    stage = "oracle";
    {
      Timer t(r, "oracle");
      r.oracle = model_oracle(problem);
    }

    for (const IdentityRow& row : r.identities) {
      if (row.status != "ok") {
        r.status = "identity_failure";
        return static_cast<int>(kExitIdentity);
      }
    }
    return static_cast<int>(kExitOk);
  });
}

CommandResult cmd_scan(const RunConfig& config, const ScanOptions& options) {
  RunReport report;
  report.command = "scan";
  report.config_text = emit_config(config);
  return guarded(std::move(report), [&](RunReport& r, std::string& stage) {
    validate(config);
    stage = "scan";
    const std::vector<double> schedule =
        geometric_schedule(options.from, options.to, options.points);
    {
      Timer t(r, "scan");
      r.scan = coupling_scan(config.model, schedule, config.integration, config.bw,
                             config.state_index);
    }
    for (const ScanRow& row : r.scan->rows) {
      if (row.ok) continue;
      r.status = "partial";
      r.failure = FailureInfo{"scan", "lambda " + format_real(row.lambda) + ": " + row.error};
      if (row.failure_kind == "degenerate") return static_cast<int>(kExitDegenerate);
      if (row.failure_kind == "config_error") return static_cast<int>(kExitConfig);
      return static_cast<int>(kExitNonConvergence);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace bwlab
