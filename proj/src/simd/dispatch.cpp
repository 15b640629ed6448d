#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "htlr/simd.hpp"
#include "simd/variants.hpp"

namespace htlr::simd {

namespace {

using namespace detail;

constexpr KernelTable kScalarTable{Isa::kScalar,  dot_scalar,    axpy_scalar,  gemv_n_scalar,
                                   gemv_t_scalar, gemm_n_scalar, gemm_tn_scalar};
#if defined(HTLR_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2,    dot_avx2,    axpy_avx2,  gemv_n_avx2,
                                 gemv_t_avx2,   gemm_n_avx2, gemm_tn_avx2};
#endif
#if defined(HTLR_HAVE_NEON)
constexpr KernelTable kNeonTable{Isa::kNeon,    dot_neon,    axpy_neon,  gemv_n_neon,
                                 gemv_t_neon,   gemm_n_neon, gemm_tn_neon};
#endif

bool cpu_has_avx2() {
#if defined(HTLR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  if (const char* env = std::getenv("HTLR_SIMD")) {
    try {
      const Isa requested = parse_isa(env);
      if (std::string_view(env) != "auto" && isa_supported(requested))
        return &kernels_for(requested);
    } catch (const std::invalid_argument&) {
      // unknown names fall through to host detection
    }
  }
#if defined(HTLR_HAVE_NEON)
  return &kNeonTable;
#else
  if (cpu_has_avx2()) return &kernels_for(Isa::kAvx2);
  return &kScalarTable;
#endif
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
    case Isa::kNeon:
#if defined(HTLR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error("SIMD variant '" + std::string(isa_name(isa)) +
                             "' is not available on this build/CPU");
  switch (isa) {
#if defined(HTLR_HAVE_AVX2)
    case Isa::kAvx2:
      return kAvx2Table;
#endif
#if defined(HTLR_HAVE_NEON)
    case Isa::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* chosen = select_default();
    const KernelTable* expected = nullptr;
    g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

Isa active_isa() { return active().isa; }

void set_isa(Isa isa) { g_active.store(&kernels_for(isa), std::memory_order_release); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  if (name == "auto") {
#if defined(HTLR_HAVE_NEON)
    return Isa::kNeon;
#else
    return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
#endif
  }
  throw std::invalid_argument("unknown SIMD variant '" + std::string(name) + "'");
}

}  // namespace htlr::simd
