#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "htlr/error.hpp"
#include "htlr/kernels.hpp"
#include "htlr/quadrature.hpp"
#include "support.hpp"

using namespace htlr;
using testing_support::Gen;

namespace {

// Legendre nodes/weights on [0,1] by bisection on P_q, independent of the
// library's Newton iteration.
struct Rule {
  std::vector<double> x, w;
};

Rule legendre_by_bisection(int q) {
  auto eval = [q](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  Rule r;
  const int grid = 4000;
  double dp = 0.0;
  for (int s = 0; s < grid; ++s) {
    double a = -1.0 + 2.0 * s / grid, b = -1.0 + 2.0 * (s + 1) / grid;
    double fa = eval(a, dp), fb = eval(b, dp);
    if (fa * fb > 0) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b), fm = eval(m, dp);
      if (fa * fm <= 0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    const double x = 0.5 * (a + b);
    eval(x, dp);
    r.x.push_back(0.5 * (x + 1.0));
    r.w.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

double tensor_rule(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                   double y1, const Rule& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    for (std::size_t j = 0; j < r.x.size(); ++j)
      s += r.w[i] * r.w[j] * f(x0 + (x1 - x0) * r.x[i], y0 + (y1 - y0) * r.x[j]);
  return s * (x1 - x0) * (y1 - y0);
}

// Integral of f over [0,a]^2 with f singular at the origin: peel off the
// three regular quadrants, recurse toward the corner until the increment
// drops below tol relative to the running total.
double adaptive_corner_2d(const std::function<double(double, double)>& f, double a, double tol) {
  const Rule r = legendre_by_bisection(24);
  double total = 0.0;
  for (int level = 0; level < 60; ++level) {
    const double m = 0.5 * a;
    const double inc = tensor_rule(f, m, a, 0, m, r) + tensor_rule(f, 0, m, m, a, r) +
                       tensor_rule(f, m, a, m, a, r);
    total += inc;
    a = m;
    if (std::abs(inc) < tol * std::abs(total)) break;
  }
  return total;
}

}  // namespace

TEST(Kernels, PointValues) {
  const Point o{0, 0, 0};
  EXPECT_EQ(KernelSpec::gaussian(1.3).eval(o, o, 2), 1.0);
  EXPECT_EQ(KernelSpec::slp2d().eval(o, Point{1, 0, 0}, 2), 0.0);
  const double r = 1.0 / (4.0 * std::numbers::pi);
  EXPECT_NEAR(KernelSpec::slp3d().eval(o, Point{0, r, 0}, 3), 1.0, 1e-14);
  EXPECT_NEAR(KernelSpec::slp2d().eval(o, Point{0.3, 0.4, 0}, 2), -std::log(0.5) / (2 * std::numbers::pi),
              1e-15);
  EXPECT_NEAR(KernelSpec::gaussian(std::sqrt(2.0)).eval(o, Point{1, 1, 0}, 2), std::exp(-0.5), 1e-15);
}

TEST(Kernels, SingularAtCoincidentPoints) {
  const Point x{0.2, 0.3, 0.4};
  EXPECT_THROW(KernelSpec::slp2d().eval(x, x, 2), SingularKernelError);
  EXPECT_THROW(KernelSpec::slp3d().eval(x, x, 3), SingularKernelError);
  EXPECT_FALSE(KernelSpec::slp2d().smooth_at_diagonal);
  EXPECT_TRUE(KernelSpec::gaussian(1).smooth_at_diagonal);
  EXPECT_THROW(KernelSpec::gaussian(0.0), ConfigError);
}

TEST(Kernels, FromName) {
  EXPECT_NEAR(kernel_from_name("gaussian", 3).sigma, std::sqrt(3.0), 1e-15);
  EXPECT_EQ(kernel_from_name("slp2d", 2).kind, KernelKind::kSlp2d);
  EXPECT_THROW(kernel_from_name("slp3d", 2), ConfigError);
  EXPECT_THROW(kernel_from_name("slp2d", 3), ConfigError);
  EXPECT_THROW(kernel_from_name("helmholtz", 2), ConfigError);
}

TEST(Kernels, EvalR2AgreesWithEval) {
  Gen g(51);
  for (const auto& [k, d] : {std::pair{KernelSpec::gaussian(1.7), 3}, std::pair{KernelSpec::slp2d(), 2},
                             std::pair{KernelSpec::slp3d(), 3}}) {
    for (int i = 0; i < 100; ++i) {
      const Point x{g.uniform(), g.uniform(), d == 3 ? g.uniform() : 0.0};
      const Point y{g.uniform(), g.uniform(), d == 3 ? g.uniform() : 0.0};
      double r2 = 0;
      for (int a = 0; a < d; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
      EXPECT_NEAR(k.eval_r2(r2), k.eval(x, y, d), 1e-13 * std::abs(k.eval(x, y, d)));
    }
  }
}

TEST(KernelsProperty, SymmetryAndTranslationInvariance) {
  Gen g(52);
  for (const auto& [k, d] : {std::pair{KernelSpec::gaussian(1.4), 2}, std::pair{KernelSpec::gaussian(1.7), 3},
                             std::pair{KernelSpec::slp2d(), 2}, std::pair{KernelSpec::slp3d(), 3}}) {
    for (int i = 0; i < 500; ++i) {
      const Point x{g.uniform(), g.uniform(), d == 3 ? g.uniform() : 0.0};
      const Point y{g.uniform(), g.uniform(), d == 3 ? g.uniform() : 0.0};
      EXPECT_EQ(k.eval(x, y, d), k.eval(y, x, d));
      const Point s{g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5), d == 3 ? g.uniform(-0.5, 0.5) : 0.0};
      Point xs = x, ys = y;
      for (int a = 0; a < d; ++a) {
        xs[a] += s[a];
        ys[a] += s[a];
      }
      const double v = k.eval(x, y, d);
      // Shifting perturbs the difference x - y by rounding only.
      EXPECT_NEAR(k.eval(xs, ys, d), v, 1e-15 * std::max(1.0, std::abs(v)) * 8) << k.name;
    }
  }
}

TEST(DiagonalEntry, ConstantKernelIsOne) {
  const KernelSpec one = KernelSpec::make_custom(
      "one", [](const Point&, const Point&, int) { return 1.0; }, true, true);
  EXPECT_NEAR(diagonal_entry(one, Point{0.5, 0.5, 0}, 1.0 / 16, 2), 1.0, 1e-14);
  EXPECT_NEAR(diagonal_entry(one, Point{0.5, 0.5, 0.5}, 1.0 / 16, 3), 1.0, 1e-14);
}

TEST(DiagonalEntry, GaussianNearOne) {
  // Separable: the square of the 1D cell average of exp(-x^2 / (2 sigma^2)).
  const double sigma = std::sqrt(2.0), h = 1.0 / 64;
  const double avg1 = sigma * std::sqrt(std::numbers::pi / 2) * 2 * std::erf(h / (2 * std::sqrt(2.0) * sigma)) / h;
  const double v = diagonal_entry(KernelSpec::gaussian(sigma), Point{0.3, 0.3, 0}, h, 2);
  EXPECT_NEAR(v, avg1 * avg1, 1e-14);
  EXPECT_LT(v, 1.0);
}

TEST(DiagonalEntry, Slp2dMatchesAdaptiveOracle) {
  const double h = 1.0 / 16;
  const auto f = [](double x, double y) {
    return -std::log(std::sqrt(x * x + y * y)) / (2 * std::numbers::pi);
  };
  // Four identical quadrants of side h/2 around the centre.
  const double want = 4.0 * adaptive_corner_2d(f, h / 2, 1e-13) / (h * h);
  const double got = diagonal_entry(KernelSpec::slp2d(), Point{0.5, 0.5, 0}, h, 2);
  EXPECT_NEAR(got, want, 1e-8 * std::abs(want));
}

TEST(DiagonalEntry, Slp2dClosedForm) {
  // Cell average of -log r / (2 pi) over [-a,a]^2 from the closed form
  // int_{[0,a]^2} log r = a^2 (log(2 a^2)/2 - 3/2 + pi/4).
  const double h = 1.0 / 16, a = h / 2;
  const double quadrant = a * a * (0.5 * std::log(2 * a * a) - 1.5 + std::numbers::pi / 4);
  const double want = -4.0 * quadrant / (2 * std::numbers::pi) / (h * h);
  EXPECT_NEAR(diagonal_entry(KernelSpec::slp2d(), Point{0.5, 0.5, 0}, h, 2), want, 1e-10 * std::abs(want));
}

TEST(DiagonalEntry, Slp3dMatchesClosedForm) {
  // int over [-a,a]^3 of 1/r = 8 a^2 * (int over the unit cube of 1/r).
  const double h = 1.0 / 16, a = h / 2;
  // Over the unit cube split into 3 pyramids with apex at 0, each over a
  // face x=1: int_0^1 int_0^1 int_0^1 t^2 / (t sqrt(1+u^2+v^2)) = (1/2) int 1/sqrt(1+u^2+v^2).
  const Rule r = legendre_by_bisection(30);
  double face = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    for (std::size_t j = 0; j < r.x.size(); ++j)
      face += r.w[i] * r.w[j] / std::sqrt(1 + r.x[i] * r.x[i] + r.x[j] * r.x[j]);
  const double unit_cube = 3.0 * 0.5 * face;
  const double want = 8.0 * a * a * unit_cube / (4 * std::numbers::pi) / (h * h * h);
  EXPECT_NEAR(diagonal_entry(KernelSpec::slp3d(), Point{0.5, 0.5, 0.5}, h, 3), want, 1e-10 * want);
}

TEST(DiagonalEntryProperty, ConvergesInQ) {
  const double h = 1.0 / 16;
  for (const auto& [k, d] : {std::pair{KernelSpec::slp2d(), 2}, std::pair{KernelSpec::slp3d(), 3}}) {
    const Point c{0.5, 0.5, 0.5};
    const double v10 = diagonal_entry(k, c, h, d, {10, true});
    const double v20 = diagonal_entry(k, c, h, d, {20, true});
    EXPECT_LE(std::abs(v10 - v20), 1e-9 * std::abs(v20)) << k.name;
  }
}

TEST(Quadrature, GaussLegendreExactness) {
  for (std::size_t q : {1, 2, 5, 10, 20}) {
    const QuadRule r = gauss_legendre(q);
    double wsum = 0.0;
    for (double w : r.w) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (std::size_t deg = 0; deg < 2 * q; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < q; ++i) s += r.w[i] * std::pow(r.x[i], deg);
      EXPECT_NEAR(s, 1.0 / (deg + 1.0), 1e-14) << "q=" << q << " deg=" << deg;
    }
  }
}

TEST(Quadrature, GradedRuleResolvesLog) {
  // Each segment sees log's branch point at relative distance 0.15 / 0.85,
  // so q = 10 is good to about 1e-8 and q = 20 to rounding.
  for (const auto& [q, tol] : {std::pair<std::size_t, double>{10, 1e-8}, {20, 1e-13}}) {
    const QuadRule r = graded_rule(q);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::log(r.x[i]);
    EXPECT_NEAR(s, -1.0, tol) << "q=" << q;
  }
}

TEST(Quadrature, TriangleApex) {
  // Area of a triangle and the integral of 1/|y - apex| over a right triangle.
  const Point a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  const PointFn one = [](const Point&) { return 1.0; };
  EXPECT_NEAR(integrate_triangle_apex(one, a, b, c, 10), 0.5, 1e-14);
  const PointFn inv = [&](const Point& y) { return 1.0 / std::hypot(y[0], y[1]); };
  // int over {x, y >= 0, x + y <= 1} of 1/r in polar form: int_0^{pi/2} dphi / (cos + sin).
  const double want = std::sqrt(2.0) * std::log(std::tan(3 * std::numbers::pi / 8));
  // The edge integrand 1 / |e1 + v e2| has complex poles at v = (1 +- i) / 2.
  EXPECT_NEAR(integrate_triangle_apex(inv, a, b, c, 10), want, 1e-7);
  EXPECT_NEAR(integrate_triangle_apex(inv, a, b, c, 20), want, 1e-13);
}

TEST(Nystrom, EntriesAndRowDot) {
  Gen g(53);
  const UniformGrid grid = make_grid(2, 8);
  const NystromEntries e(KernelSpec::slp2d(), CoefficientFn::constant(0.7), grid);
  EXPECT_DOUBLE_EQ(e.weight(), 1.0 / 64);
  EXPECT_NEAR(e.entry(3, 3), 0.7 + e.diag_kernel(3) / 64, 1e-16);
  EXPECT_EQ(e.entry(3, 5), KernelSpec::slp2d().eval(grid.point(3), grid.point(5), 2) / 64);
  const auto u = g.vec(64);
  for (std::size_t i : {0, 17, 63}) {
    double s = 0.0;
    for (std::size_t j = 0; j < 64; ++j) s += e.entry(i, j) * u[j];
    EXPECT_NEAR(e.row_dot(i, u), s, 1e-14);
  }
  EXPECT_THROW(NystromEntries(KernelSpec::slp3d(), CoefficientFn::constant(0), grid), ConfigError);
}

TEST(Nystrom, NonTranslationInvariantDiagonal) {
  const KernelSpec k = KernelSpec::make_custom(
      "xy", [](const Point& x, const Point& y, int) { return x[0] + y[0]; }, true, false);
  const UniformGrid grid = make_grid(2, 4);
  const NystromEntries e(k, CoefficientFn::function([](const Point& x) { return x[1]; }), grid);
  // cell average of x0 + y0 over the cell = 2 x0.
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(e.diag_kernel(i), 2 * grid.point(i)[0], 1e-14);
    EXPECT_NEAR(e.entry(i, i), grid.point(i)[1] + 2 * grid.point(i)[0] / 16, 1e-15);
  }
}
