#include "bwlab/simd_kernels.hpp"

#include <immintrin.h>

namespace bwlab::simd::avx2 {

void outer_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                      double* acc_re, double* acc_im) {
  for (std::size_t a = 0; a < n; ++a) {
    const double wr = w * f_re[a];
    const double wi = w * f_im[a];
    const __m256d vwr = _mm256_set1_pd(wr);
    const __m256d vwi = _mm256_set1_pd(wi);
    double* row_re = acc_re + a * n;
    double* row_im = acc_im + a * n;
    std::size_t b = 0;
    for (; b + 4 <= n; b += 4) {
      const __m256d fr = _mm256_loadu_pd(f_re + b);
      const __m256d fi = _mm256_loadu_pd(f_im + b);
      __m256d re = _mm256_loadu_pd(row_re + b);
      __m256d im = _mm256_loadu_pd(row_im + b);
      // re += wr*fr - wi*fi ; im += wr*fi + wi*fr
      re = _mm256_add_pd(re, _mm256_fmsub_pd(vwr, fr, _mm256_mul_pd(vwi, fi)));
      im = _mm256_add_pd(im, _mm256_fmadd_pd(vwr, fi, _mm256_mul_pd(vwi, fr)));
      _mm256_storeu_pd(row_re + b, re);
      _mm256_storeu_pd(row_im + b, im);
    }
    for (; b < n; ++b) {
      row_re[b] += wr * f_re[b] - wi * f_im[b];
      row_im[b] += wr * f_im[b] + wi * f_re[b];
    }
  }
}

void axpy_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                     double* acc_re, double* acc_im) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t a = 0;
  for (; a + 4 <= n; a += 4) {
    _mm256_storeu_pd(acc_re + a,
                     _mm256_fmadd_pd(vw, _mm256_loadu_pd(f_re + a), _mm256_loadu_pd(acc_re + a)));
    _mm256_storeu_pd(acc_im + a,
                     _mm256_fmadd_pd(vw, _mm256_loadu_pd(f_im + a), _mm256_loadu_pd(acc_im + a)));
  }
  for (; a < n; ++a) {
    acc_re[a] += w * f_re[a];
    acc_im[a] += w * f_im[a];
  }
}

void pair_products(const double* s1_re, const double* s1_im, std::size_t n1, const double* s2_re,
                   const double* s2_im, std::size_t n2, double* f_re, double* f_im) {
  for (std::size_t i = 0; i < n1; ++i) {
    const __m256d ar = _mm256_set1_pd(s1_re[i]);
    const __m256d ai = _mm256_set1_pd(s1_im[i]);
    double* out_re = f_re + i * n2;
    double* out_im = f_im + i * n2;
    std::size_t j = 0;
    for (; j + 4 <= n2; j += 4) {
      const __m256d br = _mm256_loadu_pd(s2_re + j);
      const __m256d bi = _mm256_loadu_pd(s2_im + j);
      _mm256_storeu_pd(out_re + j, _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi)));
      _mm256_storeu_pd(out_im + j, _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br)));
    }
    for (; j < n2; ++j) {
      out_re[j] = s1_re[i] * s2_re[j] - s1_im[i] * s2_im[j];
      out_im[j] = s1_re[i] * s2_im[j] + s1_im[i] * s2_re[j];
    }
  }
}

}  // namespace bwlab::simd::avx2
