#include <doctest.h>

#include "bwlab/bw_solver.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/operators.hpp"
#include "fixtures.hpp"

#include <cmath>

using namespace bwlab;

TEST_CASE("projectors partition the identity") {
  const TwoParticleBasis b = build_basis(build_spectrum(dirac_like_config(2)));
  const ProjectorSet p = projectors(b);
  const Matrix sum = p.pp.matrix() + p.pm.matrix() + p.mp.matrix() + p.mm.matrix();
  CHECK(sum == Matrix::Identity(16, 16));
  CHECK((p.pp.matrix() * p.mm.matrix()).isZero(0.0));
  CHECK(p.pp.matrix().trace() == 4.0);
}

TEST_CASE("D, inversion and G0") {
  const TwoParticleBasis b = build_basis(build_spectrum(fixtures::dim4()));
  const Operator D = build_D(b, 2.1);
  CHECK(D(0, 0) == doctest::Approx(0.1));
  CHECK(D(1, 1) == doctest::Approx(2.3));
  CHECK(D(3, 3) == doctest::Approx(4.5));
  CHECK_THROWS_AS(invert_diagonal(build_D(b, 2.0)), DegenerateError);
  const Operator G0 = build_G0(b, 2.1);
  CHECK(G0(0, 0) == doctest::Approx(10.0));
  CHECK(G0(1, 1) == 0.0);
  CHECK(G0(3, 3) == doctest::Approx(-1.0 / 4.5));
  // mixed pairs are never checked
  CHECK_NOTHROW(build_G0(b, -0.2));
  CHECK_THROWS_AS(build_G0(b, 2.0), DegenerateError);
}

TEST_CASE("no-pair Hamiltonian and virtual-pair operator") {
  const ModelConfig c = fixtures::dim4();
  const TwoParticleBasis b = build_basis(build_spectrum(c));
  const ProjectorSet p = projectors(b);
  const Operator Ic = build_interaction(c, b, InteractionKind::coulomb);
  const Operator Hc = build_Hc(b, p, Ic);
  CHECK(Hc.hermitian());
  CHECK(Hc(0, 0) == doctest::Approx(2.1));
  CHECK(Hc(0, 1) == 0.0);
  const Operator H1 = build_HDelta1(p, Ic);
  CHECK(H1(0, 0) == 0.0);
  CHECK(H1(0, 3) == doctest::Approx(0.1));
  CHECK(H1(3, 0) == doctest::Approx(-0.1));
  CHECK(H1(1, 2) == 0.0);

  const NoPairSolution np = solve_no_pair(Hc, p);
  CHECK(np.energy == doctest::Approx(2.1));
  // no first-order contribution from H_Delta1
  const Vector& psi = np.state.amplitudes();
  CHECK(psi.dot(H1.matrix() * psi) == 0.0);
  CHECK_THROWS_AS(solve_no_pair(Hc, p, 1), ConfigError);
}

TEST_CASE("reduced resolvent") {
  const ModelConfig c0 = fixtures::dim4(0.0, 0.0);
  const TwoParticleBasis b = build_basis(build_spectrum(c0));
  const ProjectorSet p = projectors(b);
  const Operator Hc = build_Hc(b, p, build_interaction(c0, b, InteractionKind::coulomb));
  const NoPairSolution np = solve_no_pair(Hc, p);

  CHECK(resolvent_apply(Hc, 2.1, np.state, np.state.amplitudes()).norm() == 0.0);
  const Vector v = Vector::Unit(4, 1);
  const Vector g = resolvent_apply(Hc, 2.1, np.state, v);
  CHECK((g - v / 2.3).cwiseAbs().maxCoeff() < 1e-15);

  for (double lc : {0.05, 0.1, 0.3}) {
    ModelConfig cc = dirac_like_config(2);
    cc.coulomb = {lc, {MatrixSpec::Preset::random_symmetric}};
    const TwoParticleBasis bb = build_basis(build_spectrum(cc));
    const ProjectorSet pp = projectors(bb);
    const Operator H = build_Hc(bb, pp, build_interaction(cc, bb, InteractionKind::coulomb));
    const NoPairSolution s = solve_no_pair(H, pp);
    for (double E : {s.energy, s.energy + 0.013, 1.7, 1.3}) {
      const Resolvent G(H, E, s.state);
      const Matrix lhs = pp.mm.matrix() * G.matrix() * build_D(bb, E).matrix();
      CHECK(fixtures::max_abs(lhs - pp.mm.matrix()) < 1e-12);
      const Vector out = G.apply(Vector::Ones(16));
      CHECK(std::abs(s.state.amplitudes().dot(out)) < 1e-12);
    }
  }
}

TEST_CASE("resolvent at a Q-space eigenvalue is degenerate") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  const Operator Hc(h, true);
  const StateVector psi(Vector::Unit(2, 0));
  CHECK_THROWS_AS(Resolvent(Hc, 1.0, psi), DegenerateError);
}
