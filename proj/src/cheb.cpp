#include "htlr/cheb.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "htlr/error.hpp"
#include "htlr/kernels.hpp"

namespace htlr {

ChebGrid1D cheb_points(double a, double b, std::size_t p) {
  if (!(a < b)) throw ConfigError("Chebyshev interval needs a < b");
  if (p == 0) throw ConfigError("Chebyshev order must be at least 1");
  ChebGrid1D g{a, b, std::vector<double>(p)};
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (std::size_t t = 0; t < p; ++t)
    g.nodes[t] = half * std::cos((2.0 * static_cast<double>(t) + 1.0) * std::numbers::pi /
                                 (2.0 * static_cast<double>(p))) +
                 mid;
  return g;
}

double lagrange_eval(const ChebGrid1D& grid, std::size_t t, double x) {
  const auto& xi = grid.nodes;
  double v = 1.0;
  for (std::size_t j = 0; j < xi.size(); ++j)
    if (j != t) v *= (x - xi[j]) / (xi[t] - xi[j]);
  return v;
}

DenseMatrix factor_matrix(std::span<const double> points, const ChebGrid1D& grid) {
  const std::size_t p = grid.order();
  const double slack = 1e-12 * (grid.b - grid.a);
  DenseMatrix m(points.size(), p);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < grid.a - slack || points[i] > grid.b + slack)
      throw ConfigError("interpolation point " + std::to_string(points[i]) + " outside [" +
                        std::to_string(grid.a) + ", " + std::to_string(grid.b) + "]");
    for (std::size_t t = 0; t < p; ++t) m(i, t) = lagrange_eval(grid, t, points[i]);
  }
  return m;
}

DenseTensor core_tensor(const KernelSpec& kernel, std::span<const ChebGrid1D> grids_tau,
                        std::span<const ChebGrid1D> grids_sigma) {
  const int d = static_cast<int>(grids_tau.size());
  if (grids_sigma.size() != grids_tau.size() || d < 1 || d > kMaxDim)
    throw_dimension("core_tensor: node grids must match in dimension");
  Shape shape;
  for (const auto& g : grids_tau) shape.push_back(g.order());
  for (const auto& g : grids_sigma) shape.push_back(g.order());
  const std::size_t nt = shape_size(std::span(shape).first(d));
  const std::size_t ns = shape_size(std::span(shape).subspan(d));

  auto node_point = [d](std::span<const ChebGrid1D> grids, std::size_t lin) {
    Point x{};
    for (int k = 0; k < d; ++k) {
      const std::size_t p = grids[k].order();
      x[k] = grids[k].nodes[lin % p];
      lin /= p;
    }
    return x;
  };

  std::vector<Point> xs(nt), ys(ns);
  for (std::size_t i = 0; i < nt; ++i) xs[i] = node_point(grids_tau, i);
  for (std::size_t j = 0; j < ns; ++j) ys[j] = node_point(grids_sigma, j);

  DenseTensor core(shape);
  auto data = core.data();
  for (std::size_t j = 0; j < ns; ++j)
    for (std::size_t i = 0; i < nt; ++i) data[i + nt * j] = kernel.eval(xs[i], ys[j], d);
  return core;
}

double lebesgue_constant(std::size_t p, std::size_t samples) {
  if (p == 0) throw ConfigError("Lebesgue constant needs p >= 1");
  if (samples < 2) samples = 2;
  const ChebGrid1D g = cheb_points(-1.0, 1.0, p);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = -1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(samples - 1);
    double sum = 0.0;
    for (std::size_t t = 0; t < p; ++t) sum += std::abs(lagrange_eval(g, t, x));
    best = std::max(best, sum);
  }
  return best;
}

double asymptotic_error_bound(const BoundParams& b) {
  if (!(b.c_as > 0 && b.gamma > 0 && b.eta > 0 && b.lambda_p > 0 && b.p > 0 && b.d > 0))
    throw ConfigError("bound parameters must be positive");
  const double pp1 = static_cast<double>(b.p + 1);
  return 4.0 * b.c_as * std::pow(b.gamma / (4.0 * b.eta), pp1) *
         std::pow(b.lambda_p, 2.0 * b.d - 1.0) * static_cast<double>(b.d);
}

}  // namespace htlr
