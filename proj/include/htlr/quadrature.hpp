#pragma once

// Gauss-Legendre rules and the Duffy-type integrators used for the
// singular diagonal entries of the Nystrom matrix.

#include <cstddef>
#include <functional>
#include <vector>

#include "htlr/grid.hpp"

namespace htlr {

struct QuadRule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;  // weights summing to 1
};

QuadRule gauss_legendre(std::size_t q);

// Composite Gauss-Legendre on [0, 1] with breakpoints 0, r^L, ..., r, 1:
// resolves integrands like t^a log t at t = 0.
QuadRule graded_rule(std::size_t q, double ratio = 0.15, int levels = 15);

using PointFn = std::function<double(const Point&)>;

// Tensor Gauss-Legendre over [lo, hi] (q points per direction).
double integrate_box(const PointFn& f, const Point& lo, const Point& hi, int d, std::size_t q);

// Integral over the cube [c, c + s*a]^d (s = +-1 per dimension given by the
// orthant bits) of f, singular only at the corner c. Each cube is split into
// d Duffy pyramids with a graded rule toward the apex.
double integrate_corner_cube(const PointFn& f, const Point& c, double a, unsigned orthant, int d,
                             std::size_t q);

// Integral over the triangle (apex, b, c) of f, singular only at the apex.
double integrate_triangle_apex(const PointFn& f, const Point& apex, const Point& b,
                               const Point& c, std::size_t q);

}  // namespace htlr
