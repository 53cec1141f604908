// Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include "bwlab/commands.hpp"
#include "bwlab/controversy.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/quadrature.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace bwlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

// Spectrum with p positive and q negative states, levels at least 0.05 apart.
ModelConfig random_spectrum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelConfig c;
  c.positive_energies.clear();
  c.negative_energies.clear();
  const int p = 1 + static_cast<int>(rng() % 3);
  const int q = 1 + static_cast<int>(rng() % 3);
  double e = 0.5 + u(rng);
  for (int k = 0; k < p; ++k, e += 0.05 + 0.5 * u(rng)) c.positive_energies.push_back(e);
  e = -0.5 - u(rng);
  for (int k = 0; k < q; ++k, e -= 0.05 + 0.5 * u(rng)) c.negative_energies.push_back(e);
  c.seed = rng();
  c.coulomb = {0.1, {MatrixSpec::Preset::random_symmetric}};
  c.delta = {0.05, {MatrixSpec::Preset::random_symmetric}};
  return c;
}

// Energy at least `gap` away from every pair energy of `basis`.
double energy_away_from_poles(const TwoParticleBasis& basis, std::mt19937_64& rng, double lo,
                              double hi, double gap) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (;;) {
    const double E = u(rng);
    bool ok = true;
    for (std::size_t k = 0; k < basis.dim(); ++k) ok = ok && std::abs(E - basis.pair_energy(k)) > gap;
    if (ok) return E;
  }
}

ModelConfig dim4(double coulomb, double delta) {
  ModelConfig c;
  c.coulomb.scale = coulomb;
  c.delta.scale = delta;
  return c;
}

// dim-4 ones, dim-4 random-symmetric (three seeds), dim-16 random-symmetric.
std::vector<ModelConfig> fixtures() {
  std::vector<ModelConfig> out{dim4(0.1, 0.05)};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ModelConfig c = dim4(0.1, 0.05);
    c.seed = seed;
    c.coulomb.matrix.source = MatrixSpec::Preset::random_symmetric;
    c.delta.matrix.source = MatrixSpec::Preset::random_symmetric;
    out.push_back(c);
  }
  ModelConfig big = dirac_like_config(2);
  big.coulomb = {0.1, {MatrixSpec::Preset::random_symmetric}};
  big.delta = {0.05, {MatrixSpec::Preset::random_symmetric}};
  out.push_back(big);
  return out;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const IntegrationSettings settings;
  double worst_exact = 0.0, worst_quad = 0.0;
  auto check = [&](const ModelConfig& c, double E) {
    const SingleParticleSpectrum s = build_spectrum(c);
    const TwoParticleBasis b = build_basis(s);
    const Matrix C = contour_integral_Finv(b, s, E).matrix();
    const ProjectorSet p = projectors(b);
    const Matrix Di = invert_diagonal(build_D(b, E)).matrix();
    const Matrix ref = (p.pp.matrix() - p.mm.matrix()) * Di;
    worst_exact = std::max(worst_exact, max_abs(C - ref) / std::max(1.0, max_abs(ref)));
    const QuadratureResult q = quadrature_oracle_Finv(b, s, E, settings);
    worst_quad = std::max(worst_quad, max_abs(q.real.matrix() - C) / max_abs(C));
  };
  check(dim4(0.1, 0.05), 2.1);
  for (int k = 0; k < 20; ++k) {
    const ModelConfig c = random_spectrum(rng);
    const TwoParticleBasis b = build_basis(build_spectrum(c));
    const double Emin = 2.0 * c.positive_energies.front();
    check(c, energy_away_from_poles(b, rng, Emin - 0.5, Emin + 1.5, 0.02));
  }
  const double dt = seconds_since(t0);
  o.pass = worst_exact <= 1e-12 && worst_quad <= 1e-6 && dt < 10.0;
  o.detail << "exact " << worst_exact << ", quadrature " << worst_quad << ", " << dt << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  int samples = 0;
  while (samples < 100) {
    const ModelConfig c = samples == 0 ? dim4(0.1, 0.05) : random_spectrum(rng);
    const SingleParticleSpectrum s = build_spectrum(c);
    const TwoParticleBasis b = build_basis(s);
    const double E = energy_away_from_poles(b, rng, -4.0, 5.0, 1e-2);
    const double eps = u(rng);
    const ComplexVector s1 = propagator_S(b, s, E, eps, 1, 0.0);
    const ComplexVector s2 = propagator_S(b, s, E, eps, 2, 0.0);
    bool near_pole = false;
    for (Eigen::Index k = 0; k < s1.size(); ++k)
      near_pole = near_pole || std::abs(s1(k)) > 100.0 || std::abs(s2(k)) > 100.0;
    if (near_pole) continue;
    const Matrix D = build_D(b, E).matrix();
    for (Eigen::Index k = 0; k < s1.size(); ++k) {
      const std::complex<double> f = s1(k) * s2(k);
      const std::complex<double> g = (s1(k) + s2(k)) / D(k, k);
      worst = std::max(worst, std::abs(f - g) / std::max(1.0, std::abs(f)));
    }
    ++samples;
  }
  o.pass = worst < 1e-12;
  o.detail << "max residual " << worst << " over " << samples << " samples";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst_scalar = 0.0, worst_op = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double s = u(rng);
    double E = 0.0, Ec = 0.0;
    do {
      E = u(rng);
      Ec = u(rng);
    } while (std::abs(E - s) < 0.05 || std::abs(Ec - s) < 0.05);
    const double D = E - s, Dc = Ec - s, dE = E - Ec;
    const double lhs = 1.0 / D;
    const double rhs = 1.0 / Dc - dE / (Dc * D);
    worst_scalar = std::max(worst_scalar, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  for (int k = 0; k < 100; ++k) {
    const ModelConfig c = k == 0 ? dim4(0.1, 0.05) : random_spectrum(rng);
    const TwoParticleBasis b = build_basis(build_spectrum(c));
    const double E = energy_away_from_poles(b, rng, -4.0, 5.0, 0.05);
    const double Ec = energy_away_from_poles(b, rng, -4.0, 5.0, 0.05);
    const Matrix Di = invert_diagonal(build_D(b, E)).matrix();
    const Matrix Dci = invert_diagonal(build_Dc(b, Ec)).matrix();
    const Matrix rhs = Dci - (E - Ec) * Dci * Di;
    worst_op = std::max(worst_op, max_abs(rhs - Di) / std::max(1.0, max_abs(Di)));
  }
  o.pass = worst_scalar <= 1e-13 && worst_op <= 1e-13;
  o.detail << "scalar " << worst_scalar << ", operator " << worst_op;
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst = 0.0;
  for (const ModelConfig& c : fixtures()) {
    const ModelProblem p = build_problem(c);
    const double Ec = p.no_pair.energy;
    for (double E : {Ec, Ec + 1e-3, Ec + 0.037, Ec - 0.021}) {
      const Resolvent gamma(p.H_c, E, p.no_pair.state);
      const Matrix lhs = p.proj.mm.matrix() * gamma.matrix() * build_D(p.basis, E).matrix();
      worst = std::max(worst, max_abs(lhs - p.proj.mm.matrix()));
    }
  }
  o.pass = worst < 1e-12;
  o.detail << "max residual " << worst;
  return o;
}

Outcome criterion5() {
  Outcome o;
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  Matrix v = Matrix::Zero(2, 2);
  v(0, 1) = v(1, 0) = 0.1;
  BwControls two;
  two.order = 2;
  const EnergyLedger l = bw_selfconsistent(Operator(h, true), [v](double) { return v; },
                                           StateVector(Vector::Unit(2, 0)), 0.0, two);
  const double err2x2 = std::abs(l.E - (1.0 - std::sqrt(1.04)) / 2.0);
  const bool part_a = err2x2 <= 1e-10;
  o.detail << "2x2 error " << err2x2;

  // Same coupling multiplier convention as coupling_scan.
  const IntegrationSettings settings;
  const std::array<double, 3> lambdas{0.02, 0.04, 0.08};
  std::vector<double> x, y;
  for (double lam : lambdas) {
    const ModelProblem p = build_problem(dim4(0.1 * lam, 0.05 * lam));
    try {
      const EnergyLedger led = solve_bw(p, settings, {});
      const OracleResult orc = model_oracle(p);
      x.push_back(lam);
      y.push_back(led.E - orc.energy);
      o.detail << "; lambda " << lam << ": E_BW - E_oracle = " << y.back();
    } catch (const std::exception& e) {
      o.detail << "; lambda " << lam << ": " << e.what();
    }
  }
  bool part_b = false;
  if (x.size() == lambdas.size()) {
    const PowerLawFit f = fit_power_law(x, y);
    part_b = std::abs(f.exponent - 4.0) <= 0.3;
    o.detail << "; slope " << f.exponent << " (need 4 +- 0.3)";
  }
  o.pass = part_a && part_b;
  return o;
}

Outcome criterion6() {
  Outcome o;
  const IntegrationSettings settings;
  double worst_claim = 0.0, worst_chain = 0.0;
  for (const ModelConfig& c : fixtures()) {
    const ModelProblem p = build_problem(c);
    const double Ec = p.no_pair.energy;
    std::vector<double> energies{Ec + 1e-3, Ec + 0.02, Ec - 0.015};
    try {
      energies.push_back(solve_bw(p, settings, {}).E);
    } catch (const std::exception&) {
      // identities are algebraic; the probe energies still apply
    }
    for (double E : energies) {
      const double dE = E - Ec;
      const ControversyEvaluator ev(p, E, settings);
      const double L = ev.combined(Convention::lindgren, dE);
      const double K = ev.combined(Convention::dkz, dE);
      worst_claim = std::max(worst_claim,
                             std::abs(L - K - ev.predicted(dE)) / std::max(1.0, std::abs(L)));
      const double sum = ev.delta_e1() + ev.delta_e2b().reduced;
      worst_chain = std::max(worst_chain, std::abs(sum - L) / std::max(std::abs(L), 1e-300));
    }
  }
  o.pass = worst_claim <= 1e-12 && worst_chain <= 1e-10;
  o.detail << "central claim " << worst_claim << ", chain " << worst_chain;
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = Clock::now();
  const ScanOptions opts;
  const RunConfig config;
  const ScanResult s = coupling_scan(config.model, geometric_schedule(opts.from, opts.to, opts.points),
                                     config.integration, config.bw);
  const double dt = seconds_since(t0);
  if (!s.complete || !s.fit) {
    o.pass = false;
    o.detail << "scan incomplete, " << dt << " s";
    return o;
  }
  const double slope = s.fit->exponent;
  const double n = std::round(slope);
  o.pass = n >= 3.0 && std::abs(slope - n) <= 0.2 && s.fit->r_squared > 0.999 && dt < 60.0;
  o.detail << "slope " << slope << ", R^2 " << s.fit->r_squared << ", " << dt
           << " s (need integer >= 3 within 0.2, R^2 > 0.999)";
  return o;
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(BWLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  pclose(f);
  return out;
}

std::string without_timings(const std::string& json) {
  std::istringstream in(json);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"timings_ms\"") == std::string::npos) out += line + '\n';
  return out;
}

Outcome criterion8() {
  Outcome o;
  for (const char* cmd : {"verify --format json", "compare --format json", "scan --format json"}) {
    const std::string a = without_timings(run_cli(cmd));
    const std::string b = without_timings(run_cli(cmd));
    const bool same = !a.empty() && a == b;
    o.pass = o.pass && same;
    o.detail << cmd << (same ? " identical; " : " differs; ");
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "threw: " << e.what();
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  ("
              << o.detail.str() << ")\n";
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
