#pragma once

// Leaf payloads of the hierarchical operators.
//
// TuckerBlock: core of order 2d with orthonormal per-dimension factors; the
//   block is core x_l U_l x_{d+l} V_l reshaped to |tau| x |sigma|.
// LowRankBlock: the same interpolant with Kronecker-materialized factors,
//   U G V^T (the conventional H-matrix leaf).
// DenseBlock: explicit Nystrom entries.
//
// The quadrature weight h^d is folded into the core, so every payload is a
// submatrix of the Nystrom matrix A rather than of the bare kernel matrix.

#include <cstddef>
#include <span>
#include <vector>

#include "htlr/grid.hpp"
#include "htlr/kernels.hpp"
#include "htlr/tensor.hpp"

namespace htlr {

struct BlockOptions {
  bool qrcp = false;        // rank-trimming pivoted QR instead of plain QR
  double qrcp_tol = 1e-14;  // relative |R_kk| cutoff
};

// Raw Chebyshev interpolation data before orthogonalization.
struct InterpolationData {
  std::vector<DenseMatrix> u;  // |tau_l| x p
  std::vector<DenseMatrix> v;  // |sigma_l| x p
  DenseTensor core;            // k(xi_t, eta_s), unscaled
};

struct TuckerBlock {
  IndexBox tau, sigma;
  DenseTensor core;
  std::vector<DenseMatrix> u, v;
};

struct LowRankBlock {
  IndexBox tau, sigma;
  DenseMatrix u, g, v;
};

struct DenseBlock {
  IndexBox tau, sigma;
  DenseMatrix m;
};

InterpolationData interpolate_block(const KernelSpec& k, const UniformGrid& grid,
                                    const IndexBox& tau, const IndexBox& sigma, std::size_t p);

TuckerBlock build_tlr(const KernelSpec& k, const UniformGrid& grid, const IndexBox& tau,
                      const IndexBox& sigma, std::size_t p, const BlockOptions& opts = {});
LowRankBlock build_lowrank(const KernelSpec& k, const UniformGrid& grid, const IndexBox& tau,
                           const IndexBox& sigma, std::size_t p, const BlockOptions& opts = {});
DenseBlock build_dense(const NystromEntries& entries, const IndexBox& tau, const IndexBox& sigma);

DenseMatrix materialize(const TuckerBlock& b);
DenseMatrix materialize(const LowRankBlock& b);
// h^d-weighted interpolant before orthogonalization.
DenseMatrix materialize(const InterpolationData& data, double weight);

// f_tau += B u_sigma, both in local box order.
void tlr_apply_add(const TuckerBlock& b, std::span<const double> u_sigma, std::span<double> f_tau);
void lowrank_apply_add(const LowRankBlock& b, std::span<const double> u_sigma,
                       std::span<double> f_tau);
void dense_apply_add(const DenseBlock& b, std::span<const double> u_sigma, std::span<double> f_tau);

std::vector<double> tlr_apply(const TuckerBlock& b, std::span<const double> u_sigma);
std::vector<double> lowrank_apply(const LowRankBlock& b, std::span<const double> u_sigma);

std::size_t storage_count(const TuckerBlock& b);
std::size_t storage_count(const LowRankBlock& b);
std::size_t storage_count(const DenseBlock& b);

// Stored factor / core scalars, for storage accounting.
std::size_t factor_count(const TuckerBlock& b);
std::size_t factor_count(const LowRankBlock& b);

}  // namespace htlr
