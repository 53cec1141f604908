#include "bwlab/simd_kernels.hpp"

namespace bwlab::simd::scalar {

void outer_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                      double* acc_re, double* acc_im) {
  for (std::size_t a = 0; a < n; ++a) {
    const double wr = w * f_re[a];
    const double wi = w * f_im[a];
    double* row_re = acc_re + a * n;
    double* row_im = acc_im + a * n;
    for (std::size_t b = 0; b < n; ++b) {
      row_re[b] += wr * f_re[b] - wi * f_im[b];
      row_im[b] += wr * f_im[b] + wi * f_re[b];
    }
  }
}

void axpy_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                     double* acc_re, double* acc_im) {
  for (std::size_t a = 0; a < n; ++a) {
    acc_re[a] += w * f_re[a];
    acc_im[a] += w * f_im[a];
  }
}

void pair_products(const double* s1_re, const double* s1_im, std::size_t n1, const double* s2_re,
                   const double* s2_im, std::size_t n2, double* f_re, double* f_im) {
  for (std::size_t i = 0; i < n1; ++i) {
    double* out_re = f_re + i * n2;
    double* out_im = f_im + i * n2;
    for (std::size_t j = 0; j < n2; ++j) {
      out_re[j] = s1_re[i] * s2_re[j] - s1_im[i] * s2_im[j];
      out_im[j] = s1_re[i] * s2_im[j] + s1_im[i] * s2_re[j];
    }
  }
}

}  // namespace bwlab::simd::scalar
