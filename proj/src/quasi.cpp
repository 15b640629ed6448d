#include "htlr/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "htlr/error.hpp"
#include "htlr/quadrature.hpp"

namespace htlr {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * s;
}

// One Sutherland-Hodgman pass against an axis-aligned half-plane:
// keep points with sign * (x[axis] - bound) >= 0.
Polygon clip_axis(const Polygon& in, int axis, double bound, double sign) {
  Polygon out;
  if (in.empty()) return out;
  const int other = 1 - axis;
  auto inside = [&](const Vec2& p) { return sign * (p[axis] - bound) >= 0.0; };
  auto cut = [&](const Vec2& s, const Vec2& e) {
    Vec2 q;
    q[axis] = bound;
    q[other] = s[other] + (bound - s[axis]) * (e[other] - s[other]) / (e[axis] - s[axis]);
    return q;
  };
  Vec2 s = in.back();
  for (const Vec2& e : in) {
    if (inside(e)) {
      if (!inside(s)) out.push_back(cut(s, e));
      out.push_back(e);
    } else if (inside(s)) {
      out.push_back(cut(s, e));
    }
    s = e;
  }
  return out;
}

Point to_point(const Vec2& v) { return Point{v[0], v[1], 0.0}; }

}  // namespace

TriMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<std::size_t, 3>> triangles) {
  TriMesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  if (m.triangles.empty()) throw MeshError("mesh has no triangles");
  double total = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    for (std::size_t v : m.triangles[t])
      if (v >= m.vertices.size())
        throw MeshError("triangle " + std::to_string(t + 1) + " references vertex " +
                        std::to_string(v + 1) + " of " + std::to_string(m.vertices.size()));
    const auto c = m.corners(t);
    const double area = 0.5 * std::abs(cross(c[0], c[1], c[2]));
    if (!(area > 0.0)) throw MeshError("triangle " + std::to_string(t + 1) + " has zero area");
    m.areas.push_back(area);
    m.centers.push_back({(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0});
    total += area;
  }
  for (const Vec2& v : m.vertices)
    if (v[0] < -1e-12 || v[0] > 1 + 1e-12 || v[1] < -1e-12 || v[1] > 1 + 1e-12)
      throw MeshError("vertex outside the unit square");
  if (std::abs(total - 1.0) > 1e-8)
    throw MeshError("triangles cover area " + std::to_string(total) + " instead of 1");
  return m;
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  std::size_t nv = 0, nf = 0;
  if (!(in >> nv >> nf)) throw MeshError("mesh header must be 'V F'");
  std::vector<Vec2> verts(nv);
  for (auto& v : verts)
    if (!(in >> v[0] >> v[1])) throw MeshError("truncated vertex list");
  std::vector<std::array<std::size_t, 3>> tris(nf);
  for (auto& t : tris) {
    long long a = 0, b = 0, c = 0;
    if (!(in >> a >> b >> c)) throw MeshError("truncated triangle list");
    for (long long x : {a, b, c})
      if (x < 1 || static_cast<std::size_t>(x) > nv)
        throw MeshError("vertex index " + std::to_string(x) + " out of range 1.." + std::to_string(nv));
    t = {static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1), static_cast<std::size_t>(c - 1)};
  }
  return make_mesh(std::move(verts), std::move(tris));
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file '" + path + "'");
  out.precision(17);
  out << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << '\n';
  for (const auto& t : mesh.triangles) out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

namespace {

TriMesh grid_mesh(std::size_t k, CellSplit split, const std::vector<Vec2>& verts) {
  std::vector<std::array<std::size_t, 3>> tris;
  tris.reserve(2 * k * k);
  auto vid = [k](std::size_t i, std::size_t j) { return i + (k + 1) * j; };
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if (split == CellSplit::kAntiDiagonal) {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      } else {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      }
    }
  return make_mesh(verts, std::move(tris));
}

}  // namespace

TriMesh structured_trimesh(std::size_t k, CellSplit split) {
  return perturbed_trimesh(k, 0.0, 0, split);
}

TriMesh perturbed_trimesh(std::size_t k, double amplitude, std::uint64_t seed, CellSplit split) {
  if (k == 0) throw ConfigError("mesh needs at least one cell per side");
  if (amplitude < 0.0 || amplitude >= 0.25) throw ConfigError("perturbation amplitude must be in [0, 0.25)");
  std::vector<Vec2> verts((k + 1) * (k + 1));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-amplitude, amplitude);
  const double kk = static_cast<double>(k);
  for (std::size_t j = 0; j <= k; ++j)
    for (std::size_t i = 0; i <= k; ++i) {
      Vec2 v{static_cast<double>(i) / kk, static_cast<double>(j) / kk};
      if (amplitude > 0.0 && i > 0 && i < k && j > 0 && j < k) {
        v[0] += jitter(rng) / kk;
        v[1] += jitter(rng) / kk;
      }
      verts[i + (k + 1) * j] = v;
    }
  return grid_mesh(k, split, verts);
}

double polygon_area(const Polygon& poly) { return poly.size() < 3 ? 0.0 : std::abs(signed_area(poly)); }

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon c = clip;
  if (signed_area(c) < 0.0) std::reverse(c.begin(), c.end());
  Polygon out = subject;
  for (std::size_t k = 0, n = c.size(); k < n && !out.empty(); ++k) {
    const Vec2& a = c[k];
    const Vec2& b = c[(k + 1) % n];
    Polygon in = std::move(out);
    out.clear();
    auto side = [&](const Vec2& p) { return cross(a, b, p); };
    Vec2 s = in.back();
    for (const Vec2& e : in) {
      const double fs = side(s), fe = side(e);
      if (fe >= 0.0) {
        if (fs < 0.0) {
          const double t = fs / (fs - fe);
          out.push_back({s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])});
        }
        out.push_back(e);
      } else if (fs >= 0.0) {
        const double t = fs / (fs - fe);
        out.push_back({s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])});
      }
      s = e;
    }
  }
  return out;
}

double overlap_area(const std::array<Vec2, 3>& tri, const Vec2& lo, const Vec2& hi) {
  Polygon p(tri.begin(), tri.end());
  p = clip_axis(p, 0, lo[0], 1.0);
  p = clip_axis(p, 0, hi[0], -1.0);
  p = clip_axis(p, 1, lo[1], 1.0);
  p = clip_axis(p, 1, hi[1], -1.0);
  return polygon_area(p);
}

double SparseInterpMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k];
  return s;
}

std::vector<double> SparseInterpMatrix::apply(std::span<const double> x) const {
  if (x.size() != cols) throw_dimension("sparse apply: vector length mismatch");
  std::vector<double> y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[i] = s;
  }
  return y;
}

namespace {

struct Overlap {
  std::size_t tri, cell;
  double area;
};

// All (triangle, cell) pairs with positive overlap, triangle-major and
// cell-ascending within a triangle.
std::vector<Overlap> overlaps(const TriMesh& mesh, std::size_t m) {
  if (m == 0) throw ConfigError("uniform grid needs at least one cell per side");
  const double md = static_cast<double>(m);
  const double cell_area = 1.0 / (md * md);
  std::vector<Overlap> out;
  auto cell_range = [&](double a, double b) {
    const auto lo = static_cast<long long>(std::floor(a * md));
    const auto hi = static_cast<long long>(std::ceil(b * md)) - 1;
    const long long last = static_cast<long long>(m) - 1;
    return std::pair<std::size_t, std::size_t>(std::clamp(lo, 0LL, last), std::clamp(hi, 0LL, last));
  };
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    const auto c = mesh.corners(t);
    const auto [ix0, ix1] = cell_range(std::min({c[0][0], c[1][0], c[2][0]}), std::max({c[0][0], c[1][0], c[2][0]}));
    const auto [iy0, iy1] = cell_range(std::min({c[0][1], c[1][1], c[2][1]}), std::max({c[0][1], c[1][1], c[2][1]}));
    for (std::size_t iy = iy0; iy <= iy1; ++iy)
      for (std::size_t ix = ix0; ix <= ix1; ++ix) {
        const Vec2 lo{static_cast<double>(ix) / md, static_cast<double>(iy) / md};
        const Vec2 hi{static_cast<double>(ix + 1) / md, static_cast<double>(iy + 1) / md};
        const double a = overlap_area(c, lo, hi);
        // Edge-on-edge contacts leave round-off slivers; drop them.
        if (a > 1e-12 * std::min(cell_area, mesh.areas[t])) out.push_back({t, ix + m * iy, a});
      }
  }
  return out;
}

}  // namespace

SparseInterpMatrix build_T(const TriMesh& mesh, std::size_t m_side) {
  const auto ov = overlaps(mesh, m_side);
  SparseInterpMatrix T;
  T.rows = mesh.size();
  T.cols = m_side * m_side;
  T.row_ptr.assign(T.rows + 1, 0);
  for (const auto& o : ov) ++T.row_ptr[o.tri + 1];
  for (std::size_t i = 0; i < T.rows; ++i) T.row_ptr[i + 1] += T.row_ptr[i];
  for (const auto& o : ov) {
    T.col_idx.push_back(o.cell);
    T.values.push_back(o.area / mesh.areas[o.tri]);
  }
  return T;
}

SparseInterpMatrix build_S(const TriMesh& mesh, std::size_t m_side) {
  const auto ov = overlaps(mesh, m_side);
  const double inv_cell = static_cast<double>(m_side) * static_cast<double>(m_side);
  SparseInterpMatrix S;
  S.rows = m_side * m_side;
  S.cols = mesh.size();
  S.row_ptr.assign(S.rows + 1, 0);
  for (const auto& o : ov) ++S.row_ptr[o.cell + 1];
  for (std::size_t i = 0; i < S.rows; ++i) S.row_ptr[i + 1] += S.row_ptr[i];
  S.col_idx.resize(ov.size());
  S.values.resize(ov.size());
  std::vector<std::size_t> fill(S.row_ptr.begin(), S.row_ptr.end() - 1);
  for (const auto& o : ov) {  // triangle-major, so columns stay sorted
    const std::size_t k = fill[o.cell]++;
    S.col_idx[k] = o.tri;
    S.values[k] = o.area * inv_cell;
  }
  return S;
}

std::size_t m_side_for(std::size_t N, double rho) {
  if (!(rho > 0.0)) throw ConfigError("oversampling ratio must be positive");
  return static_cast<std::size_t>(
      std::llround(std::sqrt(rho * rho * static_cast<double>(N) / 2.0)));
}

QuasiPipeline build_pipeline(const TriMesh& mesh, const QuasiConfig& cfg) {
  if (cfg.p == 0) throw ConfigError("p must be positive");
  const std::size_t target = std::max<std::size_t>(1, m_side_for(mesh.size(), cfg.rho));
  std::size_t best_m = 0, best_leaf = 0;
  auto consider = [&](std::size_t m, std::size_t leaf) {
    const auto dist = [&](std::size_t x) { return x > target ? x - target : target - x; };
    if (best_m == 0 || dist(m) < dist(best_m)) {
      best_m = m;
      best_leaf = leaf;
    }
  };
  // Leaf sides from 2p down to p; larger leaves win ties.
  for (std::size_t n0 = 2 * cfg.p; n0 >= cfg.p; --n0)
    for (std::size_t m = n0; m <= 4 * target + 2 * n0; m *= 2) consider(m, n0);

  BuildConfig bc;
  bc.p = cfg.p;
  bc.leaf = best_leaf;
  bc.rule = cfg.rule;
  bc.kernel = cfg.kernel;
  bc.coeff = cfg.coeff;
  bc.quadrature = cfg.quadrature;
  bc.threads = cfg.threads;
  const double rho =
      std::sqrt(2.0 * static_cast<double>(best_m * best_m) / static_cast<double>(mesh.size()));
  return QuasiPipeline{build_T(mesh, best_m), construct(bc, make_grid(2, best_m)),
                       build_S(mesh, best_m), best_m, rho};
}

std::vector<double> apply_pipeline(const QuasiPipeline& p, std::span<const double> u) {
  if (u.size() != p.s_mat.cols) throw_dimension("pipeline: vector length mismatch");
  const std::vector<double> su = p.s_mat.apply(u);
  const std::vector<double> asu = matvec(p.op, su, p.op.config.threads);
  return p.t_mat.apply(asu);
}

QuasiDirect::QuasiDirect(const TriMesh& mesh, KernelSpec kernel, CoefficientFn coeff,
                         QuadratureConfig cfg)
    : mesh_(&mesh), kernel_(std::move(kernel)), coeff_(std::move(coeff)), cfg_(cfg) {
  if (kernel_.required_dim() != 0 && kernel_.required_dim() != 2)
    throw ConfigError("kernel " + kernel_.name + " is not a 2D kernel");
}

double QuasiDirect::diagonal_integral(std::size_t i) const {
  auto c = mesh_->corners(i);
  Vec2 x = mesh_->centers[i];
  if (kernel_.translation_invariant) {  // integrate around the origin, see diagonal_entry
    for (Vec2& v : c) v = {v[0] - x[0], v[1] - x[1]};
    x = {0.0, 0.0};
  }
  const Point xp = to_point(x);
  const PointFn f = [&](const Point& y) { return kernel_.eval(xp, y, 2); };
  double s = 0.0;
  for (int e = 0; e < 3; ++e)
    s += integrate_triangle_apex(f, xp, to_point(c[e]), to_point(c[(e + 1) % 3]), cfg_.q);
  return s;
}

double QuasiDirect::row_dot(std::size_t i, std::span<const double> u) const {
  const std::size_t N = mesh_->size();
  if (u.size() != N) throw_dimension("quasi row_dot: vector length mismatch");
  const Vec2 xi = mesh_->centers[i];
  double s = 0.0;
  const bool builtin = kernel_.kind != KernelKind::kCustom;
  for (std::size_t j = 0; j < N; ++j) {
    if (j == i) continue;
    const Vec2& xj = mesh_->centers[j];
    double k;
    if (builtin) {
      const double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
      k = kernel_.eval_r2(dx * dx + dy * dy);
    } else {
      k = kernel_.eval(to_point(xi), to_point(xj), 2);
    }
    s += k * mesh_->areas[j] * u[j];
  }
  return s + (diagonal_integral(i) + coeff_(to_point(xi))) * u[i];
}

std::vector<double> QuasiDirect::matvec(std::span<const double> u) const {
  std::vector<double> f(mesh_->size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = row_dot(i, u);
  return f;
}

double smooth_test_function(const Vec2& x) {
  const double a = x[0] - 0.3, b = x[1] - 0.6;
  return 1.0 + 0.5 * std::exp(-a * a - b * b) + std::sin(5.0 * x[0] * x[1]);
}

}  // namespace htlr
