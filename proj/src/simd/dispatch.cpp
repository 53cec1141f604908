#include "bwlab/simd_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace bwlab::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(BWLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("BWLAB_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return detected_isa();
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_sizes(std::size_t f_re, std::size_t f_im, std::size_t acc_re, std::size_t acc_im,
                 std::size_t expected_acc) {
  if (f_re != f_im || acc_re != expected_acc || acc_im != expected_acc) {
    throw std::invalid_argument("simd kernel: span size mismatch");
  }
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) throw std::runtime_error("AVX2 is not available");
  active().store(isa, std::memory_order_relaxed);
}

void outer_accumulate(double w, std::span<const double> f_re, std::span<const double> f_im,
                      std::span<double> acc_re, std::span<double> acc_im) {
  const std::size_t n = f_re.size();
  check_sizes(n, f_im.size(), acc_re.size(), acc_im.size(), n * n);
#if defined(BWLAB_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    avx2::outer_accumulate(w, f_re.data(), f_im.data(), n, acc_re.data(), acc_im.data());
    return;
  }
#endif
  scalar::outer_accumulate(w, f_re.data(), f_im.data(), n, acc_re.data(), acc_im.data());
}

void axpy_accumulate(double w, std::span<const double> f_re, std::span<const double> f_im,
                     std::span<double> acc_re, std::span<double> acc_im) {
  const std::size_t n = f_re.size();
  check_sizes(n, f_im.size(), acc_re.size(), acc_im.size(), n);
#if defined(BWLAB_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    avx2::axpy_accumulate(w, f_re.data(), f_im.data(), n, acc_re.data(), acc_im.data());
    return;
  }
#endif
  scalar::axpy_accumulate(w, f_re.data(), f_im.data(), n, acc_re.data(), acc_im.data());
}

void pair_products(std::span<const double> s1_re, std::span<const double> s1_im,
                   std::span<const double> s2_re, std::span<const double> s2_im,
                   std::span<double> f_re, std::span<double> f_im) {
  const std::size_t n1 = s1_re.size();
  const std::size_t n2 = s2_re.size();
  if (s1_im.size() != n1 || s2_im.size() != n2 || f_re.size() != n1 * n2 ||
      f_im.size() != n1 * n2) {
    throw std::invalid_argument("simd kernel: span size mismatch");
  }
#if defined(BWLAB_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    avx2::pair_products(s1_re.data(), s1_im.data(), n1, s2_re.data(), s2_im.data(), n2,
                        f_re.data(), f_im.data());
    return;
  }
#endif
  scalar::pair_products(s1_re.data(), s1_im.data(), n1, s2_re.data(), s2_im.data(), n2,
                        f_re.data(), f_im.data());
}

}  // namespace bwlab::simd
