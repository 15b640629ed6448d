#pragma once

// Chebyshev interpolation on boxes: nodes, Lagrange basis, the factor
// matrices L_t(x_i) and the core tensor k(xi_t, eta_s), plus the
// diagnostic error bound for asymptotically smooth kernels.

#include <cstddef>
#include <span>
#include <vector>

#include "htlr/grid.hpp"
#include "htlr/tensor.hpp"

namespace htlr {

struct KernelSpec;

struct ChebGrid1D {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> nodes;  // strictly decreasing

  std::size_t order() const { return nodes.size(); }
};

ChebGrid1D cheb_points(double a, double b, std::size_t p);

// L_t(x) = prod_{j != t} (x - xi_j) / (xi_t - xi_j); t is 0-based.
double lagrange_eval(const ChebGrid1D& grid, std::size_t t, double x);

// (n x p) matrix with entry (i, t) = L_t(points[i]).
DenseMatrix factor_matrix(std::span<const double> points, const ChebGrid1D& grid);

// Order-2d tensor with entry (t_1..t_d, s_1..s_d) = k(xi_t, eta_s).
DenseTensor core_tensor(const KernelSpec& kernel, std::span<const ChebGrid1D> grids_tau,
                        std::span<const ChebGrid1D> grids_sigma);

// max over samples of sum_t |L_t(x)| on [-1, 1].
double lebesgue_constant(std::size_t p, std::size_t samples = 20001);

struct BoundParams {
  double c_as = 1.0;
  double gamma = 1.0;
  double eta = 1.0;
  std::size_t p = 1;
  int d = 2;
  double lambda_p = 1.0;
};

// 4 C gamma^{p+1} Lambda_p^{2d-1} d / (4 eta)^{p+1}, relative to the sup
// norm of the kernel on the box pair.
double asymptotic_error_bound(const BoundParams& b);

}  // namespace htlr
