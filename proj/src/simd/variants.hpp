#pragma once

#include <cstddef>

namespace htlr::simd::detail {

#define HTLR_DECLARE_VARIANT(suffix)                                                    \
  double dot_##suffix(const double* x, const double* y, std::size_t n);                \
  void axpy_##suffix(double a, const double* x, double* y, std::size_t n);             \
  void gemv_n_##suffix(std::size_t m, std::size_t n, const double* a, std::size_t lda, \
                       const double* x, double* y);                                     \
  void gemv_t_##suffix(std::size_t m, std::size_t n, const double* a, std::size_t lda, \
                       const double* x, double* y);                                     \
  void gemm_n_##suffix(std::size_t m, std::size_t n, std::size_t k, const double* a,   \
                       std::size_t lda, const double* b, std::size_t rsb,               \
                       std::size_t csb, double* c, std::size_t ldc);                    \
  void gemm_tn_##suffix(std::size_t m, std::size_t n, std::size_t k, const double* a,  \
                        std::size_t lda, const double* b, std::size_t ldb, double* c,   \
                        std::size_t ldc);

HTLR_DECLARE_VARIANT(scalar)
#if defined(HTLR_HAVE_AVX2)
HTLR_DECLARE_VARIANT(avx2)
#endif
#if defined(HTLR_HAVE_NEON)
HTLR_DECLARE_VARIANT(neon)
#endif

#undef HTLR_DECLARE_VARIANT

}  // namespace htlr::simd::detail
