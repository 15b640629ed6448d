#pragma once

// Quasi-uniform grids on [0,1]^2 given by triangle meshes (one point per
// triangle centroid), the area-overlap transfer matrices between a mesh and
// a uniform grid, and the pipeline f ~ T A_uniform S u.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "htlr/htlr.hpp"

namespace htlr {

using Vec2 = std::array<double, 2>;
using Polygon = std::vector<Vec2>;

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;  // 0-based vertex indices
  std::vector<Vec2> centers;                          // centroids
  std::vector<double> areas;

  std::size_t size() const { return triangles.size(); }
  std::array<Vec2, 3> corners(std::size_t t) const {
    return {vertices[triangles[t][0]], vertices[triangles[t][1]], vertices[triangles[t][2]]};
  }
};

// Validates (indices, positive areas, coverage of the unit square) and
// derives centroids and areas. Throws MeshError.
TriMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<std::size_t, 3>> triangles);

// Text format: "V F", then V lines "x y", then F lines "i j k" (1-based).
TriMesh load_mesh(const std::string& path);
void save_mesh(const TriMesh& mesh, const std::string& path);

// Which diagonal splits each square cell.
enum class CellSplit {
  kAntiDiagonal,  // (x0,y0)-(x1,y0)-(x0,y1) and (x1,y0)-(x1,y1)-(x0,y1)
  kMainDiagonal,  // (x0,y0)-(x1,y0)-(x1,y1) and (x0,y0)-(x1,y1)-(x0,y1)
};

TriMesh structured_trimesh(std::size_t k, CellSplit split = CellSplit::kAntiDiagonal);
// Structured mesh with interior vertices moved by up to amplitude/k in each
// coordinate. amplitude < 0.25 keeps every triangle positively oriented:
// the edge-vector cross product stays above (1 - 4 amplitude) / k^2.
TriMesh perturbed_trimesh(std::size_t k, double amplitude, std::uint64_t seed,
                          CellSplit split = CellSplit::kAntiDiagonal);

double polygon_area(const Polygon& poly);  // unsigned shoelace area
// Sutherland-Hodgman clip of `subject` against convex `clip`.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
double overlap_area(const std::array<Vec2, 3>& tri, const Vec2& lo, const Vec2& hi);

struct SparseInterpMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  double row_sum(std::size_t i) const;
  std::vector<double> apply(std::span<const double> x) const;
};

// S (M x N): S_{t,i} = |cell_t ∩ tri_i| / |cell_t|, cells of an m x m grid.
SparseInterpMatrix build_S(const TriMesh& mesh, std::size_t m_side);
// T (N x M): T_{i,t} = |tri_i ∩ cell_t| / |tri_i|.
SparseInterpMatrix build_T(const TriMesh& mesh, std::size_t m_side);

// round(sqrt(rho^2 N / 2))
std::size_t m_side_for(std::size_t N, double rho);

struct QuasiConfig {
  double rho = 2.0;
  std::size_t p = 8;
  KernelSpec kernel = KernelSpec::gaussian(1.4142135623730951);
  CoefficientFn coeff = CoefficientFn::constant(0.0);
  AdmissibilityRule rule = AdmissibilityRule::weak();
  QuadratureConfig quadrature;
  int threads = 1;
};

struct QuasiPipeline {
  SparseInterpMatrix t_mat;
  HTLRMatrix op;
  SparseInterpMatrix s_mat;
  std::size_t m_side = 0;
  double rho = 0.0;  // realized sqrt(2 M / N)
};

// Chooses the uniform grid size closest to the requested rho whose side
// splits as n0 * 2^L with leaf side n0 in [p, 2p].
QuasiPipeline build_pipeline(const TriMesh& mesh, const QuasiConfig& cfg);
std::vector<double> apply_pipeline(const QuasiPipeline& p, std::span<const double> u);

// The quasi-uniform Nystrom matrix
//   a(x_i) delta_ij + K_ij |tri_j|,  K_ii |tri_i| = integral over tri_i of k(x_i, y)
// evaluated row by row.
class QuasiDirect {
 public:
  QuasiDirect(const TriMesh& mesh, KernelSpec kernel, CoefficientFn coeff,
              QuadratureConfig cfg = {});

  double diagonal_integral(std::size_t i) const;
  double row_dot(std::size_t i, std::span<const double> u) const;
  std::vector<double> matvec(std::span<const double> u) const;

 private:
  const TriMesh* mesh_;
  KernelSpec kernel_;
  CoefficientFn coeff_;
  QuadratureConfig cfg_;
};

// 1 + 0.5 exp(-(x1-0.3)^2 - (x2-0.6)^2) + sin(5 x1 x2)
double smooth_test_function(const Vec2& x);

}  // namespace htlr
