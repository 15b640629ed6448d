#pragma once

// Hierarchical operators on uniform grids: the HTLR matrix (Tucker leaves)
// and the conventional H-matrix baseline (U G V^T leaves), their
// construction, matrix-vector products, storage accounting and the sampled
// relative-error estimator.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "htlr/blocks.hpp"
#include "htlr/grid.hpp"
#include "htlr/kernels.hpp"

namespace htlr {

struct BuildConfig {
  std::size_t p = 8;      // interpolation points per dimension
  std::size_t leaf = 16;  // leaf side n0 (N0 = n0^d)
  AdmissibilityRule rule = AdmissibilityRule::weak();
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  CoefficientFn coeff = CoefficientFn::constant(0.0);
  QuadratureConfig quadrature;
  BlockOptions block;
  int threads = 1;  // block construction threads
};

// Soft advice, e.g. when the leaf side lies outside [p, 2p].
std::vector<std::string> config_warnings(const BuildConfig& cfg);

template <class LowRank>
struct HierarchicalMatrix {
  struct Leaf {
    std::size_t node = 0;  // index into blocks.nodes()
    bool admissible = false;
    std::size_t payload = 0;  // index into lowrank or dense
  };

  UniformGrid grid;
  BuildConfig config;
  BlockClusterTree blocks;
  std::vector<Leaf> leaves;  // depth-first order
  std::vector<LowRank> lowrank;
  std::vector<DenseBlock> dense;

  std::size_t size() const { return grid.num_points(); }
};

using HTLRMatrix = HierarchicalMatrix<TuckerBlock>;
using HMatrix = HierarchicalMatrix<LowRankBlock>;

HTLRMatrix construct(const BuildConfig& cfg, const UniformGrid& grid);
HMatrix construct_hmatrix(const BuildConfig& cfg, const UniformGrid& grid);

// Deterministic for a fixed thread count; threads = 1 gives depth-first
// accumulation order.
std::vector<double> matvec(const HTLRMatrix& a, std::span<const double> u, int threads = 1);
std::vector<double> hmatrix_matvec(const HMatrix& a, std::span<const double> u, int threads = 1);

DenseMatrix materialize(const HTLRMatrix& a);
DenseMatrix materialize(const HMatrix& a);

struct StorageReport {
  std::size_t dense_scalars = 0;
  std::size_t factor_scalars = 0;
  std::size_t core_scalars = 0;
  std::size_t total_scalars = 0;
  double theoretical_bound = 0.0;  // NaN when no bound applies
};

StorageReport storage_report(const HTLRMatrix& a);
StorageReport storage_report(const HMatrix& a);

// (16 d p^{2-d} + p^d + 2^d p^d) N; NaN for strong admissibility.
double htlr_storage_bound(int d, std::size_t p, std::size_t N, const AdmissibilityRule& rule);
// (2^d p^d log2(N / N0) / d + p^d + 2^d p^d) N; NaN for strong admissibility.
double hmatrix_storage_bound(int d, std::size_t p, std::size_t N, std::size_t N0,
                             const AdmissibilityRule& rule);

// Multiply-add count of one matvec, summed over leaves.
std::size_t apply_cost(const HTLRMatrix& a);
std::size_t apply_cost(const HMatrix& a);

// Draws `count` distinct indices from [0, N) (partial Fisher-Yates).
std::vector<std::size_t> sample_rows(std::size_t N, std::size_t count, std::uint64_t seed);

using RowOracle = std::function<double(std::size_t)>;

// ||f~(I) - f(I)|| / ||f(I)|| over sampled rows I; throws
// UndefinedErrorMeasure if ||f(I)|| = 0.
double sampled_rel_error(std::span<const double> approx, const RowOracle& exact,
                         std::span<const std::size_t> rows);

double estimate_rel_error_random(std::span<const double> approx, const RowOracle& exact,
                                 std::size_t sample_size = 1000, std::uint64_t seed = 0);
double estimate_rel_error_random(const HTLRMatrix& a, const NystromEntries& exact,
                                 std::span<const double> u, std::size_t sample_size = 1000,
                                 std::uint64_t seed = 0);
double estimate_rel_error_random(const HMatrix& a, const NystromEntries& exact,
                                 std::span<const double> u, std::size_t sample_size = 1000,
                                 std::uint64_t seed = 0);

}  // namespace htlr
