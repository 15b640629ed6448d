#pragma once

// Dense double-precision kernels behind every tensor contraction, dense
// block product and QR in the library.
//
// Each kernel has a scalar reference implementation plus vectorized
// variants (AVX2+FMA on x86-64, NEON on aarch64). The active table is
// picked once at first use from the host CPU; HTLR_SIMD=scalar|avx2|neon
// in the environment or set_isa() overrides it. All matrices are
// column-major.

#include <cstddef>
#include <span>
#include <string_view>

namespace htlr::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // y(m) += A(m x n) * x(n)
  void (*gemv_n)(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y);

  // y(n) += A(m x n)^T * x(m)
  void (*gemv_t)(std::size_t m, std::size_t n, const double* a, std::size_t lda,
                 const double* x, double* y);

  // C(m x n) += A(m x k) * B(k x n), B(l, j) = b[l * rsb + j * csb].
  // Strided B covers both B and B^T without a copy.
  void (*gemm_n)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t rsb, std::size_t csb,
                 double* c, std::size_t ldc);

  // C(m x n) += A(k x m)^T * B(k x n)
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  std::size_t lda, const double* b, std::size_t ldb, double* c,
                  std::size_t ldc);
};

const KernelTable& scalar_kernels();
bool isa_supported(Isa isa);
const KernelTable& kernels_for(Isa isa);  // throws if unsupported

const KernelTable& active();
Isa active_isa();
void set_isa(Isa isa);

std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);  // "scalar", "avx2", "neon", "auto"

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace htlr::simd
