#pragma once

// Reference computations used to check the fast operators: dense Nystrom
// assembly, direct summation, truncated SVD and sequentially truncated
// HOSVD (Tucker), and relative Frobenius errors.

#include <cstddef>
#include <span>
#include <vector>

#include "htlr/kernels.hpp"
#include "htlr/tensor.hpp"

namespace htlr {

struct DenseOperator {
  DenseMatrix matrix;
};

constexpr std::size_t kDenseAssembleLimit = std::size_t{1} << 15;

// Throws ConfigError when N exceeds max_n.
DenseOperator dense_assemble(const NystromEntries& entries,
                             std::size_t max_n = kDenseAssembleLimit);

// f = A u by direct row summation; memory O(N).
std::vector<double> direct_matvec(const NystromEntries& entries, std::span<const double> u,
                                  int threads = 1);

struct SvdResult {
  DenseMatrix u;                  // rows x r
  std::vector<double> s;          // r leading singular values
  DenseMatrix v;                  // cols x r
  double rel_error = 0.0;         // sqrt(sum_{i>r} s_i^2) / ||m||_F
  std::vector<double> spectrum;   // all singular values
};

SvdResult svd_lowrank(const DenseMatrix& m, std::size_t r);
std::vector<double> singular_values(const DenseMatrix& m);
// Relative Frobenius error of the best rank-r approximation, from a spectrum.
double tail_rel_error(std::span<const double> spectrum, std::size_t r);

struct TuckerDecomposition {
  DenseTensor core;
  std::vector<DenseMatrix> factors;  // extent_k x rank_k, orthonormal
  double discarded_energy = 0.0;     // sum of discarded squared singular values
};

// Modes processed in ascending order.
TuckerDecomposition sthosvd(const DenseTensor& t, std::span<const std::size_t> ranks);
DenseTensor tucker_reconstruct(const TuckerDecomposition& t);

// ||approx - exact||_F / ||exact||_F; throws UndefinedErrorMeasure on a
// vanishing denominator.
double rel_fro_error(std::span<const double> approx, std::span<const double> exact);

}  // namespace htlr
