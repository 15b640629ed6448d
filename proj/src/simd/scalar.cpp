#include "simd/variants.hpp"

namespace htlr::simd::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_n_scalar(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                   const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j];
    const double* col = a + j * lda;
    for (std::size_t i = 0; i < m; ++i) y[i] += col[i] * xj;
  }
}

void gemv_t_scalar(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                   const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] += dot_scalar(a + j * lda, x, m);
}

void gemm_n_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                   std::size_t lda, const double* b, std::size_t rsb, std::size_t csb,
                   double* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t l = 0; l < k; ++l) {
      const double blj = b[l * rsb + j * csb];
      const double* al = a + l * lda;
      for (std::size_t i = 0; i < m; ++i) cj[i] += al[i] * blj;
    }
  }
}

void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                    std::size_t lda, const double* b, std::size_t ldb, double* c,
                    std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      c[i + j * ldc] += dot_scalar(a + i * lda, b + j * ldb, k);
}

}  // namespace htlr::simd::detail
