#include "htlr/kernels.hpp"

#include <cmath>
#include <numbers>

#include "htlr/error.hpp"
#include "htlr/quadrature.hpp"

namespace htlr {

KernelSpec KernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("Gaussian bandwidth must be positive");
  KernelSpec k;
  k.kind = KernelKind::kGaussian;
  k.name = "gaussian";
  k.sigma = sigma;
  return k;
}

KernelSpec KernelSpec::slp2d() {
  KernelSpec k;
  k.kind = KernelKind::kSlp2d;
  k.name = "slp2d";
  k.smooth_at_diagonal = false;
  return k;
}

KernelSpec KernelSpec::slp3d() {
  KernelSpec k;
  k.kind = KernelKind::kSlp3d;
  k.name = "slp3d";
  k.smooth_at_diagonal = false;
  return k;
}

KernelSpec KernelSpec::make_custom(std::string name, KernelFn fn, bool smooth_at_diagonal,
                                   bool translation_invariant) {
  if (!fn) throw ConfigError("custom kernel needs an evaluator");
  KernelSpec k;
  k.kind = KernelKind::kCustom;
  k.name = std::move(name);
  k.smooth_at_diagonal = smooth_at_diagonal;
  k.translation_invariant = translation_invariant;
  k.custom = std::move(fn);
  return k;
}

int KernelSpec::required_dim() const {
  switch (kind) {
    case KernelKind::kSlp2d:
      return 2;
    case KernelKind::kSlp3d:
      return 3;
    default:
      return 0;
  }
}

double KernelSpec::eval_r2(double r2) const {
  switch (kind) {
    case KernelKind::kGaussian:
      return std::exp(-r2 / (2.0 * sigma * sigma));
    case KernelKind::kSlp2d:
      return -std::log(r2) / (4.0 * std::numbers::pi);  // -log(r) / (2 pi)
    case KernelKind::kSlp3d:
      return 1.0 / (4.0 * std::numbers::pi * std::sqrt(r2));
    case KernelKind::kCustom:
      break;
  }
  throw ConfigError("eval_r2 is not available for custom kernels");
}

double KernelSpec::eval(const Point& x, const Point& y, int d) const {
  if (kind == KernelKind::kCustom) return custom(x, y, d);
  double r2 = 0.0;
  for (int k = 0; k < d; ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
  if (r2 == 0.0 && !smooth_at_diagonal)
    throw SingularKernelError(name + " kernel evaluated at coincident points");
  return eval_r2(r2);
}

KernelSpec kernel_from_name(const std::string& name, int d) {
  KernelSpec k;
  if (name == "gaussian")
    k = KernelSpec::gaussian(std::sqrt(static_cast<double>(d)));
  else if (name == "slp2d")
    k = KernelSpec::slp2d();
  else if (name == "slp3d")
    k = KernelSpec::slp3d();
  else
    throw ConfigError("unknown kernel '" + name + "' (expected gaussian, slp2d or slp3d)");
  if (k.required_dim() != 0 && k.required_dim() != d)
    throw ConfigError("kernel " + name + " requires dimension " + std::to_string(k.required_dim()) +
                      ", got " + std::to_string(d));
  return k;
}

double diagonal_entry(const KernelSpec& k, const Point& cell_center, double h, int d,
                      const QuadratureConfig& cfg) {
  if (!(h > 0.0)) throw ConfigError("cell width must be positive");
  if (cfg.q < 2) throw ConfigError("quadrature order must be at least 2");
  // Translation-invariant kernels are integrated around the origin so that
  // offsets far below the spacing of doubles near the center are not lost.
  const Point c = k.translation_invariant ? Point{} : cell_center;
  const PointFn f = [&](const Point& y) { return k.eval(c, y, d); };
  const double vol = std::pow(h, d);
  if (k.smooth_at_diagonal || !cfg.duffy) {
    Point lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[i] = c[i] - 0.5 * h;
      hi[i] = c[i] + 0.5 * h;
    }
    return integrate_box(f, lo, hi, d, cfg.q) / vol;
  }
  double sum = 0.0;
  for (unsigned orthant = 0; orthant < (1u << d); ++orthant)
    sum += integrate_corner_cube(f, c, 0.5 * h, orthant, d, cfg.q);
  return sum / vol;
}

NystromEntries::NystromEntries(KernelSpec kernel, CoefficientFn coeff, UniformGrid grid,
                               QuadratureConfig cfg)
    : kernel_(std::move(kernel)),
      coeff_(std::move(coeff)),
      grid_(grid),
      cfg_(cfg),
      weight_(std::pow(grid.h(), grid.d)) {
  if (kernel_.required_dim() != 0 && kernel_.required_dim() != grid.d)
    throw ConfigError("kernel " + kernel_.name + " does not match grid dimension " +
                      std::to_string(grid.d));
  if (kernel_.translation_invariant)
    cached_diag_ = diagonal_entry(kernel_, grid_.point(0), grid_.h(), grid_.d, cfg_);
}

double NystromEntries::diag_kernel(std::size_t i) const {
  if (cached_diag_) return *cached_diag_;
  return diagonal_entry(kernel_, grid_.point(i), grid_.h(), grid_.d, cfg_);
}

double NystromEntries::kernel_entry(std::size_t i, std::size_t j) const {
  if (i == j) return diag_kernel(i);
  return kernel_.eval(grid_.point(i), grid_.point(j), grid_.d);
}

double NystromEntries::entry(std::size_t i, std::size_t j) const {
  const double kij = kernel_entry(i, j) * weight_;
  return i == j ? coeff_(grid_.point(i)) + kij : kij;
}

double NystromEntries::row_dot(std::size_t i, std::span<const double> u) const {
  const std::size_t N = grid_.num_points();
  if (u.size() != N) throw_dimension("row_dot: vector length mismatch");
  const Point xi = grid_.point(i);
  double s = 0.0;
  if (kernel_.kind != KernelKind::kCustom) {
    const std::size_t n = grid_.n;
    const int d = grid_.d;
    std::size_t j = 0;
    const std::size_t outer = d == 2 ? 1 : n;
    for (std::size_t c = 0; c < outer; ++c) {
      const double dz = d == 3 ? grid_.coord(c) - xi[2] : 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const double dy = grid_.coord(b) - xi[1];
        const double base = dy * dy + dz * dz;
        for (std::size_t a = 0; a < n; ++a, ++j) {
          if (j == i) continue;
          const double dx = grid_.coord(a) - xi[0];
          s += kernel_.eval_r2(base + dx * dx) * u[j];
        }
      }
    }
  } else {
    for (std::size_t j = 0; j < N; ++j)
      if (j != i) s += kernel_.eval(xi, grid_.point(j), grid_.d) * u[j];
  }
  s += diag_kernel(i) * u[i];
  return coeff_(xi) * u[i] + weight_ * s;
}

}  // namespace htlr
