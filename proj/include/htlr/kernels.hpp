#pragma once

// Kernel functions, the coefficient a(x), and the Nystrom matrix entries
//   A_ij = a(x_i) delta_ij + K_ij h^d,
// where K_ij = k(x_i, x_j) off the diagonal and K_ii is the cell average
// of k(x_i, .) over the cell around x_i.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "htlr/grid.hpp"

namespace htlr {

enum class KernelKind { kGaussian, kSlp2d, kSlp3d, kCustom };

using KernelFn = std::function<double(const Point&, const Point&, int d)>;

struct KernelSpec {
  KernelKind kind = KernelKind::kGaussian;
  std::string name = "gaussian";
  double sigma = 1.0;
  bool smooth_at_diagonal = true;
  bool translation_invariant = true;
  KernelFn custom;

  static KernelSpec gaussian(double sigma);
  static KernelSpec slp2d();
  static KernelSpec slp3d();
  static KernelSpec make_custom(std::string name, KernelFn fn, bool smooth_at_diagonal,
                                bool translation_invariant);

  // Dimension the kernel is tied to (0 if any).
  int required_dim() const;

  // Throws SingularKernelError for singular kernels at x == y.
  double eval(const Point& x, const Point& y, int d) const;

  // Built-in kernels as a function of the squared distance (r2 > 0 for
  // the singular ones); not valid for custom kernels.
  double eval_r2(double r2) const;
};

// "gaussian" (sigma = sqrt(d)), "slp2d", "slp3d"; rejects an SLP kernel
// whose dimension differs from d.
KernelSpec kernel_from_name(const std::string& name, int d);

struct CoefficientFn {
  std::function<double(const Point&)> fn;
  double value = 0.0;

  static CoefficientFn constant(double c) { return {nullptr, c}; }
  static CoefficientFn function(std::function<double(const Point&)> f) { return {std::move(f), 0.0}; }

  bool is_constant() const { return !fn; }
  double operator()(const Point& x) const { return fn ? fn(x) : value; }
};

struct QuadratureConfig {
  std::size_t q = 10;  // Gauss-Legendre points per direction
  bool duffy = true;   // Duffy subcells for singular kernels
};

// (1/h^d) * integral over the cell [x - h/2, x + h/2]^d of k(x, y) dy.
double diagonal_entry(const KernelSpec& k, const Point& cell_center, double h, int d,
                      const QuadratureConfig& cfg = {});

// Entry oracle for the Nystrom matrix on a uniform grid. The diagonal
// kernel value is computed once when the kernel is translation invariant.
class NystromEntries {
 public:
  NystromEntries(KernelSpec kernel, CoefficientFn coeff, UniformGrid grid,
                 QuadratureConfig cfg = {});

  const KernelSpec& kernel() const { return kernel_; }
  const CoefficientFn& coeff() const { return coeff_; }
  const UniformGrid& grid() const { return grid_; }
  double weight() const { return weight_; }  // h^d

  double diag_kernel(std::size_t i) const;
  double kernel_entry(std::size_t i, std::size_t j) const;
  double entry(std::size_t i, std::size_t j) const;

  // sum_j A_ij u_j by direct summation.
  double row_dot(std::size_t i, std::span<const double> u) const;

 private:
  KernelSpec kernel_;
  CoefficientFn coeff_;
  UniformGrid grid_;
  QuadratureConfig cfg_;
  double weight_;
  std::optional<double> cached_diag_;
};

}  // namespace htlr
