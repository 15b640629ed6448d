// NEON variants (aarch64 only; Advanced SIMD is mandatory there, so no
// runtime probe is needed).

#include <arm_neon.h>

#include "simd/variants.hpp"

namespace htlr::simd::detail {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_n_neon(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) axpy_neon(x[j], a + j * lda, y, m);
}

void gemv_t_neon(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] += dot_neon(a + j * lda, x, m);
}

void gemm_n_neon(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t rsb, std::size_t csb,
                 double* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < k; ++l) axpy_neon(b[l * rsb + j * csb], a + l * lda, c + j * ldc, m);
}

void gemm_tn_neon(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  std::size_t lda, const double* b, std::size_t ldb, double* c,
                  std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) gemv_t_neon(k, m, a, lda, b + j * ldb, c + j * ldc);
}

}  // namespace htlr::simd::detail
