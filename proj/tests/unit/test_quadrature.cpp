#include <doctest.h>

#include "bwlab/quadrature.hpp"
#include "bwlab/simd_kernels.hpp"
#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace bwlab;

namespace {

double rel_err(const Matrix& a, const Matrix& b) {
  return fixtures::max_abs(a - b) / std::max(fixtures::max_abs(b), 1e-300);
}

struct Fixture {
  ModelConfig config = fixtures::dim4();
  SingleParticleSpectrum spectrum = build_spectrum(config);
  TwoParticleBasis basis = build_basis(spectrum);
  IntegrationSettings settings;
};

}  // namespace

TEST_CASE("quadrature oracle agrees with the residue engine") {
  Fixture f;
  const QuadratureResult q = quadrature_oracle_Finv(f.basis, f.spectrum, 2.1, f.settings);
  CHECK(rel_err(q.real.matrix(), contour_integral_Finv(f.basis, f.spectrum, 2.1).matrix()) < 1e-6);

  const Operator A(Matrix::Ones(4, 4), true);
  const QuadratureResult s = quadrature_oracle(f.basis, f.spectrum, 2.1, A, f.settings);
  CHECK(rel_err(s.real.matrix(), sandwich_integral(f.basis, f.spectrum, 2.1, A).matrix()) < 1e-6);
  CHECK(s.max_abs_imag < 1e-6 * fixtures::max_abs(s.real.matrix()));

  const Operator g(Matrix::Constant(4, 4, 0.05), true);
  // m inner operators correspond to J-series term m - 1
  const std::vector<Operator> js = j_series(f.basis, f.spectrum, 2.1, g, 3);
  for (std::size_t m = 1; m <= 3; ++m) {
    const std::vector<Operator> inner(m, g);
    const QuadratureResult c = quadrature_oracle_chain(f.basis, f.spectrum, 2.1, inner, f.settings);
    CAPTURE(m);
    CHECK(rel_err(c.real.matrix(), js[m - 1].matrix()) < 1e-6);
  }
}

TEST_CASE("extrapolation to zero") {
  const std::vector<double> eta{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<double> even, odd;
  for (double e : eta) {
    even.push_back(3.0 + 2.0 * e * e - 7.0 * std::pow(e, 4));
    odd.push_back(0.25 + 5.0 * e + 11.0 * e * e * e);
  }
  const std::vector<int> pe{0, 2, 4}, po{0, 1, 3};
  CHECK(extrapolate_to_zero(eta, even, pe) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(extrapolate_to_zero(eta, odd, po) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("panel breakpoints") {
  const std::vector<double> poles{-0.5, 0.05, 1.2};
  const double L = 100.0;
  const std::vector<double> b = panel_breakpoints(poles, 1e-3, L);
  CHECK(std::is_sorted(b.begin(), b.end()));
  CHECK(b.front() == -L);
  CHECK(b.back() == L);
  for (double p : poles) CHECK(std::find(b.begin(), b.end(), p) != b.end());
  CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
}

TEST_CASE("scalar and AVX2 kernels agree") {
  using namespace bwlab::simd;
  if (detected_isa() != Isa::avx2) {
    MESSAGE("AVX2 not available; scalar kernels only");
    return;
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 37u}) {
    std::vector<double> fr(n), fi(n);
    for (std::size_t k = 0; k < n; ++k) {
      fr[k] = u(rng);
      fi[k] = u(rng);
    }
    std::vector<double> ar(n * n, 0.5), ai(n * n, -0.25), br = ar, bi = ai;
    set_active_isa(Isa::scalar);
    outer_accumulate(0.3, fr, fi, ar, ai);
    set_active_isa(Isa::avx2);
    outer_accumulate(0.3, fr, fi, br, bi);
    for (std::size_t k = 0; k < n * n; ++k) {
      CHECK(ar[k] == doctest::Approx(br[k]).epsilon(1e-15));
      CHECK(ai[k] == doctest::Approx(bi[k]).epsilon(1e-15));
    }

    std::vector<double> xr(n, 1.0), xi(n, 2.0), yr = xr, yi = xi;
    set_active_isa(Isa::scalar);
    axpy_accumulate(-0.7, fr, fi, xr, xi);
    set_active_isa(Isa::avx2);
    axpy_accumulate(-0.7, fr, fi, yr, yi);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(xr[k] == doctest::Approx(yr[k]).epsilon(1e-15));
      CHECK(xi[k] == doctest::Approx(yi[k]).epsilon(1e-15));
    }

    std::vector<double> pr(n * 5), pi(n * 5), qr(n * 5), qi(n * 5);
    const std::vector<double> s2r{0.1, -0.2, 0.3, 0.4, -0.5}, s2i{0.5, 0.0, -0.3, 0.2, 0.1};
    set_active_isa(Isa::scalar);
    pair_products(fr, fi, s2r, s2i, pr, pi);
    set_active_isa(Isa::avx2);
    pair_products(fr, fi, s2r, s2i, qr, qi);
    for (std::size_t k = 0; k < n * 5; ++k) {
      CHECK(pr[k] == doctest::Approx(qr[k]).epsilon(1e-15));
      CHECK(pi[k] == doctest::Approx(qi[k]).epsilon(1e-15));
    }
  }

  Fixture f;
  const Operator A(Matrix::Ones(4, 4), true);
  set_active_isa(Isa::scalar);
  const QuadratureResult a = quadrature_oracle(f.basis, f.spectrum, 2.1, A, f.settings);
  set_active_isa(Isa::avx2);
  const QuadratureResult b = quadrature_oracle(f.basis, f.spectrum, 2.1, A, f.settings);
  CHECK(rel_err(a.real.matrix(), b.real.matrix()) < 1e-12);
  set_active_isa(detected_isa());
}
