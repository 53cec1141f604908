#pragma once

// Inner loops of the quadrature oracle. Complex arrays are stored split
// (separate real and imaginary spans). Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2/FMA variant chosen at runtime.

#include <cstddef>
#include <span>

namespace bwlab::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Best instruction set supported by both the build and the running CPU.
Isa detected_isa() noexcept;

/// Instruction set used by the dispatching entry points below. Defaults to
/// detected_isa(); the environment variable BWLAB_ISA=scalar forces the
/// reference kernels.
Isa active_isa() noexcept;

/// Overrides the active instruction set (tests). Requesting an ISA the CPU
/// lacks throws std::runtime_error.
void set_active_isa(Isa isa);

/// acc[a*n + b] += w * f[a] * f[b] for complex f of length n.
void outer_accumulate(double w, std::span<const double> f_re, std::span<const double> f_im,
                      std::span<double> acc_re, std::span<double> acc_im);

/// acc[a] += w * f[a].
void axpy_accumulate(double w, std::span<const double> f_re, std::span<const double> f_im,
                     std::span<double> acc_re, std::span<double> acc_im);

/// f[i*n2 + j] = s1[i] * s2[j] (complex outer product of two short vectors).
void pair_products(std::span<const double> s1_re, std::span<const double> s1_im,
                   std::span<const double> s2_re, std::span<const double> s2_im,
                   std::span<double> f_re, std::span<double> f_im);

namespace scalar {
void outer_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                      double* acc_re, double* acc_im);
void axpy_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                     double* acc_re, double* acc_im);
void pair_products(const double* s1_re, const double* s1_im, std::size_t n1, const double* s2_re,
                   const double* s2_im, std::size_t n2, double* f_re, double* f_im);
}  // namespace scalar

#if defined(BWLAB_HAVE_AVX2)
namespace avx2 {
void outer_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                      double* acc_re, double* acc_im);
void axpy_accumulate(double w, const double* f_re, const double* f_im, std::size_t n,
                     double* acc_re, double* acc_im);
void pair_products(const double* s1_re, const double* s1_im, std::size_t n1, const double* s2_re,
                   const double* s2_im, std::size_t n2, double* f_re, double* f_im);
}  // namespace avx2
#endif

}  // namespace bwlab::simd
