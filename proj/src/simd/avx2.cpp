// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may run before the dispatcher has checked the CPU.

#include <immintrin.h>

#include "simd/variants.hpp"

namespace htlr::simd::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= n) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_n_avx2(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y) {
  // Four columns per sweep so each y chunk is loaded/stored once per four FMAs.
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const double* c0 = a + j * lda;
    const double* c1 = c0 + lda;
    const double* c2 = c1 + lda;
    const double* c3 = c2 + lda;
    const __m256d x0 = _mm256_set1_pd(x[j]);
    const __m256d x1 = _mm256_set1_pd(x[j + 1]);
    const __m256d x2 = _mm256_set1_pd(x[j + 2]);
    const __m256d x3 = _mm256_set1_pd(x[j + 3]);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      __m256d acc = _mm256_loadu_pd(y + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(c0 + i), x0, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(c1 + i), x1, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(c2 + i), x2, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(c3 + i), x3, acc);
      _mm256_storeu_pd(y + i, acc);
    }
    for (; i < m; ++i)
      y[i] += c0[i] * x[j] + c1[i] * x[j + 1] + c2[i] * x[j + 2] + c3[i] * x[j + 3];
  }
  for (; j < n; ++j) axpy_avx2(x[j], a + j * lda, y, m);
}

void gemv_t_avx2(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const double* c0 = a + j * lda;
    const double* c1 = c0 + lda;
    const double* c2 = c1 + lda;
    const double* c3 = c2 + lda;
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd();
    __m256d s3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      const __m256d xv = _mm256_loadu_pd(x + i);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(c0 + i), xv, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(c1 + i), xv, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(c2 + i), xv, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(c3 + i), xv, s3);
    }
    double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
    for (; i < m; ++i) {
      r0 += c0[i] * x[i];
      r1 += c1[i] * x[i];
      r2 += c2[i] * x[i];
      r3 += c3[i] * x[i];
    }
    y[j] += r0;
    y[j + 1] += r1;
    y[j + 2] += r2;
    y[j + 3] += r3;
  }
  for (; j < n; ++j) y[j] += dot_avx2(a + j * lda, x, m);
}

void gemm_n_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t rsb, std::size_t csb,
                 double* c, std::size_t ldc) {
  // 8x4 register tile: two ymm rows by four C columns.
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    double* c0 = c + j * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    const double* b0 = b + j * csb;
    const double* b1 = b0 + csb;
    const double* b2 = b1 + csb;
    const double* b3 = b2 + csb;
    std::size_t i = 0;
    for (; i + 8 <= m; i += 8) {
      __m256d t00 = _mm256_loadu_pd(c0 + i), t01 = _mm256_loadu_pd(c0 + i + 4);
      __m256d t10 = _mm256_loadu_pd(c1 + i), t11 = _mm256_loadu_pd(c1 + i + 4);
      __m256d t20 = _mm256_loadu_pd(c2 + i), t21 = _mm256_loadu_pd(c2 + i + 4);
      __m256d t30 = _mm256_loadu_pd(c3 + i), t31 = _mm256_loadu_pd(c3 + i + 4);
      for (std::size_t l = 0; l < k; ++l) {
        const double* al = a + l * lda + i;
        const __m256d a0 = _mm256_loadu_pd(al);
        const __m256d a1 = _mm256_loadu_pd(al + 4);
        const std::size_t bo = l * rsb;
        __m256d bv = _mm256_set1_pd(b0[bo]);
        t00 = _mm256_fmadd_pd(a0, bv, t00);
        t01 = _mm256_fmadd_pd(a1, bv, t01);
        bv = _mm256_set1_pd(b1[bo]);
        t10 = _mm256_fmadd_pd(a0, bv, t10);
        t11 = _mm256_fmadd_pd(a1, bv, t11);
        bv = _mm256_set1_pd(b2[bo]);
        t20 = _mm256_fmadd_pd(a0, bv, t20);
        t21 = _mm256_fmadd_pd(a1, bv, t21);
        bv = _mm256_set1_pd(b3[bo]);
        t30 = _mm256_fmadd_pd(a0, bv, t30);
        t31 = _mm256_fmadd_pd(a1, bv, t31);
      }
      _mm256_storeu_pd(c0 + i, t00);
      _mm256_storeu_pd(c0 + i + 4, t01);
      _mm256_storeu_pd(c1 + i, t10);
      _mm256_storeu_pd(c1 + i + 4, t11);
      _mm256_storeu_pd(c2 + i, t20);
      _mm256_storeu_pd(c2 + i + 4, t21);
      _mm256_storeu_pd(c3 + i, t30);
      _mm256_storeu_pd(c3 + i + 4, t31);
    }
    for (; i + 4 <= m; i += 4) {
      __m256d t0 = _mm256_loadu_pd(c0 + i);
      __m256d t1 = _mm256_loadu_pd(c1 + i);
      __m256d t2 = _mm256_loadu_pd(c2 + i);
      __m256d t3 = _mm256_loadu_pd(c3 + i);
      for (std::size_t l = 0; l < k; ++l) {
        const __m256d a0 = _mm256_loadu_pd(a + l * lda + i);
        const std::size_t bo = l * rsb;
        t0 = _mm256_fmadd_pd(a0, _mm256_set1_pd(b0[bo]), t0);
        t1 = _mm256_fmadd_pd(a0, _mm256_set1_pd(b1[bo]), t1);
        t2 = _mm256_fmadd_pd(a0, _mm256_set1_pd(b2[bo]), t2);
        t3 = _mm256_fmadd_pd(a0, _mm256_set1_pd(b3[bo]), t3);
      }
      _mm256_storeu_pd(c0 + i, t0);
      _mm256_storeu_pd(c1 + i, t1);
      _mm256_storeu_pd(c2 + i, t2);
      _mm256_storeu_pd(c3 + i, t3);
    }
    for (; i < m; ++i) {
      double s0 = c0[i], s1 = c1[i], s2 = c2[i], s3 = c3[i];
      for (std::size_t l = 0; l < k; ++l) {
        const double ail = a[l * lda + i];
        const std::size_t bo = l * rsb;
        s0 += ail * b0[bo];
        s1 += ail * b1[bo];
        s2 += ail * b2[bo];
        s3 += ail * b3[bo];
      }
      c0[i] = s0;
      c1[i] = s1;
      c2[i] = s2;
      c3[i] = s3;
    }
  }
  for (; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t l = 0; l < k; ++l) axpy_avx2(b[l * rsb + j * csb], a + l * lda, cj, m);
  }
}

void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  std::size_t lda, const double* b, std::size_t ldb, double* c,
                  std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) gemv_t_avx2(k, m, a, lda, b + j * ldb, c + j * ldc);
}

}  // namespace htlr::simd::detail
