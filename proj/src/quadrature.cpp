#include "htlr/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "htlr/error.hpp"

namespace htlr {

namespace {

QuadRule compute_gauss_legendre(std::size_t q) {
  QuadRule r{std::vector<double>(q), std::vector<double>(q)};
  const double n = static_cast<double>(q);
  for (std::size_t i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= q; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    r.x[i] = 0.5 * (1.0 - x);
    r.x[q - 1 - i] = 0.5 * (1.0 + x);
    r.w[i] = r.w[q - 1 - i] = 0.5 * w;
  }
  if (q % 2 == 1) r.x[q / 2] = 0.5;
  return r;
}

}  // namespace

QuadRule gauss_legendre(std::size_t q) {
  if (q == 0) throw ConfigError("quadrature needs at least one point");
  static std::mutex mu;
  static std::map<std::size_t, QuadRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, compute_gauss_legendre(q)).first;
  return it->second;
}

QuadRule graded_rule(std::size_t q, double ratio, int levels) {
  const QuadRule base = gauss_legendre(q);
  std::vector<double> breaks{0.0};
  for (int l = levels; l >= 1; --l) breaks.push_back(std::pow(ratio, l));
  breaks.push_back(1.0);
  QuadRule r;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], len = breaks[s + 1] - breaks[s];
    for (std::size_t i = 0; i < q; ++i) {
      r.x.push_back(a + len * base.x[i]);
      r.w.push_back(len * base.w[i]);
    }
  }
  return r;
}

double integrate_box(const PointFn& f, const Point& lo, const Point& hi, int d, std::size_t q) {
  const QuadRule g = gauss_legendre(q);
  double vol = 1.0;
  for (int k = 0; k < d; ++k) vol *= hi[k] - lo[k];
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= q;
  double sum = 0.0;
  Point y{};
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rest = lin;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const std::size_t i = rest % q;
      rest /= q;
      y[k] = lo[k] + (hi[k] - lo[k]) * g.x[i];
      w *= g.w[i];
    }
    sum += w * f(y);
  }
  return sum * vol;
}

double integrate_corner_cube(const PointFn& f, const Point& c, double a, unsigned orthant, int d,
                             std::size_t q) {
  const QuadRule gv = gauss_legendre(q);
  const QuadRule gt = graded_rule(q);
  std::size_t nv = 1;
  for (int k = 1; k < d; ++k) nv *= q;
  double sum = 0.0;
  Point y{};
  // Pyramid `lead`: the coordinate along `lead` is the largest one.
  for (int lead = 0; lead < d; ++lead) {
    for (std::size_t vl = 0; vl < nv; ++vl) {
      double v[kMaxDim] = {0, 0, 0};
      double wv = 1.0;
      std::size_t rest = vl;
      for (int k = 0; k < d; ++k) {
        if (k == lead) continue;
        const std::size_t i = rest % q;
        rest /= q;
        v[k] = gv.x[i];
        wv *= gv.w[i];
      }
      v[lead] = 1.0;
      for (std::size_t it = 0; it < gt.x.size(); ++it) {
        const double t = gt.x[it];
        for (int k = 0; k < d; ++k) {
          const double sgn = (orthant >> k) & 1u ? -1.0 : 1.0;
          y[k] = c[k] + sgn * a * t * v[k];
        }
        sum += wv * gt.w[it] * std::pow(t, d - 1) * f(y);
      }
    }
  }
  return sum * std::pow(a, d);
}

double integrate_triangle_apex(const PointFn& f, const Point& apex, const Point& b,
                               const Point& c, std::size_t q) {
  const QuadRule gv = gauss_legendre(q);
  const QuadRule gt = graded_rule(q);
  const double e1x = b[0] - apex[0], e1y = b[1] - apex[1];
  const double e2x = c[0] - b[0], e2y = c[1] - b[1];
  const double jac = std::abs(e1x * e2y - e1y * e2x);  // = 2 |T|
  double sum = 0.0;
  Point y{};
  for (std::size_t iv = 0; iv < q; ++iv) {
    const double v = gv.x[iv];
    for (std::size_t it = 0; it < gt.x.size(); ++it) {
      const double t = gt.x[it];
      y[0] = apex[0] + t * (e1x + v * e2x);
      y[1] = apex[1] + t * (e1y + v * e2y);
      sum += gv.w[iv] * gt.w[it] * t * f(y);
    }
  }
  return sum * jac;
}

}  // namespace htlr
