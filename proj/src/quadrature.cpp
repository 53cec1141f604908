#include "bwlab/quadrature.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/simd_kernels.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bwlab {

namespace {

struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
  GaussRule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x.push_back(z);
    r.w.push_back(w);
    if (z != 0.0) {
      r.x.push_back(-z);
      r.w.push_back(w);
    }
  }
  return r;
}

std::vector<double> pole_positions(const SingleParticleSpectrum& spectrum, double E) {
  std::vector<double> p;
  for (double e : spectrum.energies()) {
    p.push_back(e - 0.5 * E);
    p.push_back(0.5 * E - e);
  }
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

// Runs `integrand(eps, eta, w)` over all nodes for each eta; the callback
// accumulates w * integrand into per-eta complex buffers of length `width`.
// Returns i/(2 pi) times the accumulated integrals, extrapolated in eta.
template <class Integrand>
QuadratureResult integrate_and_extrapolate(const SingleParticleSpectrum& spectrum, double E,
                                           std::size_t width, std::size_t dim,
                                           const IntegrationSettings& settings,
                                           Integrand&& integrand, double tail_imag = 0.0) {
  validate(settings);
  const GaussRule rule = gauss_legendre(settings.quadrature_points);
  const double cutoff = settings.cutoff_factor * spectrum.max_abs_energy();
  const std::vector<double> poles = pole_positions(spectrum, E);
  const std::size_t n_eta = settings.eta_sequence.size();

  // values[k][entry] after the i/(2 pi) factor
  std::vector<std::vector<double>> val_re(n_eta), val_im(n_eta);
  std::size_t nodes = 0;
  std::vector<double> acc_re(width), acc_im(width);
  for (std::size_t k = 0; k < n_eta; ++k) {
    const double eta = settings.eta_sequence[k];
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);
    const std::vector<double> bp = panel_breakpoints(poles, eta, cutoff);
    nodes = 0;
    for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
      const double mid = 0.5 * (bp[p] + bp[p + 1]);
      const double half = 0.5 * (bp[p + 1] - bp[p]);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        integrand(mid + half * rule.x[q], eta, half * rule.w[q], acc_re, acc_im);
        ++nodes;
      }
    }
    val_re[k].resize(width);
    val_im[k].resize(width);
    const double c = 1.0 / (2.0 * std::numbers::pi);
    for (std::size_t e = 0; e < width; ++e) {
      // i (a + i b) / (2 pi) = (-b + i a) / (2 pi)
      val_re[k][e] = -acc_im[e] * c;
      val_im[k][e] = acc_re[e] * c + tail_imag;
    }
  }

  std::vector<int> re_pow(n_eta), im_pow(n_eta);
  for (std::size_t k = 0; k < n_eta; ++k) {
    re_pow[k] = static_cast<int>(2 * k);
    im_pow[k] = k == 0 ? 0 : static_cast<int>(2 * k - 1);
  }
  const std::span<const double> etas(settings.eta_sequence);

  std::vector<double> re(width), im(width), spread(width);
  std::vector<double> sample(n_eta);
  for (std::size_t e = 0; e < width; ++e) {
    for (std::size_t k = 0; k < n_eta; ++k) sample[k] = val_re[k][e];
    re[e] = extrapolate_to_zero(etas, sample, re_pow);
    const double partial = extrapolate_to_zero(etas.subspan(1), std::span(sample).subspan(1),
                                               std::span(re_pow).first(n_eta - 1));
    spread[e] = std::abs(re[e] - partial);
    for (std::size_t k = 0; k < n_eta; ++k) sample[k] = val_im[k][e];
    im[e] = extrapolate_to_zero(etas, sample, im_pow);
  }

  double scale = 0.0;
  for (double v : re) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (double s : spread) worst = std::max(worst, s);

  QuadratureResult out;
  out.extrapolation_spread = scale > 0.0 ? worst / scale : worst;
  out.nodes_per_eta = nodes;
  if (out.extrapolation_spread > settings.extrapolation_tolerance) {
    throw NonConvergenceError("quadrature oracle: eta extrapolation did not converge (spread " +
                                  std::to_string(out.extrapolation_spread) + ")",
                              out.extrapolation_spread, static_cast<int>(n_eta));
  }

  const auto d = static_cast<Eigen::Index>(dim);
  Matrix R(d, d), I(d, d);
  if (width == dim) {
    R.setZero();
    I.setZero();
    for (Eigen::Index a = 0; a < d; ++a) {
      R(a, a) = re[static_cast<std::size_t>(a)];
      I(a, a) = im[static_cast<std::size_t>(a)];
    }
  } else {
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        const auto idx = static_cast<std::size_t>(a * d + b);
        R(a, b) = re[idx];
        I(a, b) = im[idx];
      }
  }
  out.max_abs_imag = I.cwiseAbs().maxCoeff();
  out.real = Operator(std::move(R), false);
  out.imag = std::move(I);
  return out;
}

// Split complex propagator values per pair at one node.
class PairAmplitudes {
 public:
  PairAmplitudes(const TwoParticleBasis& basis, const SingleParticleSpectrum& spectrum, double E)
      : n_(basis.n()), E_(E), spectrum_(spectrum),
        s1_re_(n_), s1_im_(n_), s2_re_(n_), s2_im_(n_),
        f_re_(n_ * n_), f_im_(n_ * n_) {}

  void evaluate(double eps, double eta) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double e = spectrum_.energy(i);
      const double shift = spectrum_.sign(i) == EnergySign::positive ? eta : -eta;
      set_inverse(0.5 * E_ + eps - e, shift, s1_re_[i], s1_im_[i]);
      set_inverse(0.5 * E_ - eps - e, shift, s2_re_[i], s2_im_[i]);
    }
    simd::pair_products(s1_re_, s1_im_, s2_re_, s2_im_, f_re_, f_im_);
  }

  std::span<const double> re() const { return f_re_; }
  std::span<const double> im() const { return f_im_; }

 private:
  static void set_inverse(double x, double y, double& re, double& im) {
    const double den = x * x + y * y;
    re = x / den;
    im = -y / den;
  }

  std::size_t n_;
  double E_;
  const SingleParticleSpectrum& spectrum_;
  std::vector<double> s1_re_, s1_im_, s2_re_, s2_im_, f_re_, f_im_;
};

}  // namespace

std::vector<double> panel_breakpoints(std::span<const double> pole_positions, double eta,
                                      double cutoff) {
  if (!(eta > 0.0) || !(cutoff > 0.0)) throw std::invalid_argument("panel_breakpoints: bad range");
  std::vector<double> bp{-cutoff, cutoff};
  for (double p : pole_positions) {
    if (std::abs(p) >= cutoff) continue;
    bp.push_back(p);
    for (double r = 0.25 * eta; r < 2.0 * cutoff; r *= 2.0) {
      if (p - r > -cutoff) bp.push_back(p - r);
      if (p + r < cutoff) bp.push_back(p + r);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

double extrapolate_to_zero(std::span<const double> eta, std::span<const double> values,
                           std::span<const int> powers) {
  if (eta.size() != values.size() || powers.empty() || powers.size() > eta.size() ||
      powers[0] != 0) {
    throw std::invalid_argument("extrapolate_to_zero: inconsistent sizes");
  }
  const double h = *std::max_element(eta.begin(), eta.end());
  const auto rows = static_cast<Eigen::Index>(eta.size());
  const auto cols = static_cast<Eigen::Index>(powers.size());
  Matrix A(rows, cols);
  Vector y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double x = eta[static_cast<std::size_t>(r)] / h;
    for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = std::pow(x, powers[static_cast<std::size_t>(c)]);
    y(r) = values[static_cast<std::size_t>(r)];
  }
  const Vector coef = A.colPivHouseholderQr().solve(y);
  return coef(0);
}

QuadratureResult quadrature_oracle(const TwoParticleBasis& basis,
                                   const SingleParticleSpectrum& spectrum, double E,
                                   const Operator& A, const IntegrationSettings& settings) {
  const std::size_t dim = basis.dim();
  if (A.dim() != dim) throw std::invalid_argument("quadrature_oracle: dimension mismatch");
  PairAmplitudes amp(basis, spectrum, E);
  QuadratureResult r = integrate_and_extrapolate(
      spectrum, E, dim * dim, dim, settings,
      [&](double eps, double eta, double w, std::vector<double>& acc_re,
          std::vector<double>& acc_im) {
        amp.evaluate(eps, eta);
        simd::outer_accumulate(w, amp.re(), amp.im(), acc_re, acc_im);
      });
  // A is eps-independent: multiply after integrating.
  Matrix re = r.real.matrix().cwiseProduct(A.matrix());
  r.imag = r.imag.cwiseProduct(A.matrix());
  r.max_abs_imag = r.imag.cwiseAbs().maxCoeff();
  r.real = Operator(std::move(re), false);
  return r;
}

QuadratureResult quadrature_oracle_Finv(const TwoParticleBasis& basis,
                                        const SingleParticleSpectrum& spectrum, double E,
                                        const IntegrationSettings& settings) {
  const std::size_t dim = basis.dim();
  PairAmplitudes amp(basis, spectrum, E);
  // F^-1 -> -1/eps^2 beyond the cutoff; i/(2 pi) * (-2/L) is purely imaginary.
  const double cutoff = settings.cutoff_factor * spectrum.max_abs_energy();
  const double tail = -1.0 / (std::numbers::pi * cutoff);
  return integrate_and_extrapolate(
      spectrum, E, dim, dim, settings,
      [&](double eps, double eta, double w, std::vector<double>& acc_re,
          std::vector<double>& acc_im) {
        amp.evaluate(eps, eta);
        simd::axpy_accumulate(w, amp.re(), amp.im(), acc_re, acc_im);
      },
      tail);
}

QuadratureResult quadrature_oracle_chain(const TwoParticleBasis& basis,
                                         const SingleParticleSpectrum& spectrum, double E,
                                         std::span<const Operator> inner,
                                         const IntegrationSettings& settings) {
  const std::size_t dim = basis.dim();
  for (const Operator& op : inner)
    if (op.dim() != dim) throw std::invalid_argument("quadrature_oracle_chain: dimension mismatch");
  PairAmplitudes amp(basis, spectrum, E);
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexVector f(d);
  ComplexMatrix M(d, d);
  return integrate_and_extrapolate(
      spectrum, E, dim * dim, dim, settings,
      [&](double eps, double eta, double w, std::vector<double>& acc_re,
          std::vector<double>& acc_im) {
        amp.evaluate(eps, eta);
        for (Eigen::Index a = 0; a < d; ++a)
          f(a) = {amp.re()[static_cast<std::size_t>(a)], amp.im()[static_cast<std::size_t>(a)]};
        M = f.asDiagonal();
        for (const Operator& op : inner) {
          M = (M * op.matrix().cast<std::complex<double>>()).eval();
          M = (M * f.asDiagonal()).eval();
        }
        for (Eigen::Index a = 0; a < d; ++a)
          for (Eigen::Index b = 0; b < d; ++b) {
            const auto idx = static_cast<std::size_t>(a * d + b);
            acc_re[idx] += w * M(a, b).real();
            acc_im[idx] += w * M(a, b).imag();
          }
      });
}

}  // namespace bwlab
