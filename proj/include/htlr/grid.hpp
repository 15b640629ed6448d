#pragma once

// Uniform tensor grids on [0,1]^d, index boxes, the balanced 2^d cluster
// tree and the block cluster tree built from an admissibility rule.
//
// Indices are 0-based; an IndexBox holds half-open ranges [begin, end) per
// dimension. Grid point i sits at the centre of cell i: (i + 1/2) h.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace htlr {

constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

struct UniformGrid {
  int d = 2;
  std::size_t n = 1;

  double h() const { return 1.0 / static_cast<double>(n); }
  std::size_t num_points() const;
  double coord(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(n); }
  Point point(std::size_t linear) const;
};

UniformGrid make_grid(int d, std::size_t n);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

struct IndexBox {
  int d = 0;
  std::array<IndexRange, kMaxDim> r{};

  std::size_t size() const;
  std::size_t extent(int k) const { return r[k].size(); }
  bool operator==(const IndexBox&) const = default;
};

IndexBox full_box(const UniformGrid& grid);

struct DomainBox {
  int d = 0;
  Point lo{};
  Point hi{};

  double diameter() const;
};

DomainBox domain_of(const UniformGrid& grid, const IndexBox& box);
double box_distance(const DomainBox& a, const DomainBox& b);

struct AdmissibilityRule {
  enum class Kind { kWeak, kStrong };
  Kind kind = Kind::kWeak;
  double eta = 0.0;

  static AdmissibilityRule weak() { return {Kind::kWeak, 0.0}; }
  static AdmissibilityRule strong(double eta);
};

// Weak: the boxes intersect in a set of zero volume (touching is fine).
// Strong: max(diam) <= eta * dist, with a 1e-12 relative allowance so that
// exact geometric ties are admissible.
bool is_admissible(const AdmissibilityRule& rule, const DomainBox& a, const DomainBox& b);

struct ClusterNode {
  IndexBox box;
  int level = 0;
  std::int64_t parent = -1;
  std::int64_t first_child = -1;  // 2^d children stored contiguously

  bool is_leaf() const { return first_child < 0; }
};

class ClusterTree {
 public:
  ClusterTree(const UniformGrid& grid, std::size_t leaf_side);

  const UniformGrid& grid() const { return grid_; }
  std::size_t leaf_side() const { return leaf_side_; }
  int depth() const { return depth_; }
  int num_children() const { return 1 << grid_.d; }

  const std::vector<ClusterNode>& nodes() const { return nodes_; }
  const ClusterNode& node(std::size_t i) const { return nodes_[i]; }
  std::vector<std::size_t> leaves() const;

 private:
  UniformGrid grid_;
  std::size_t leaf_side_;
  int depth_ = 0;
  std::vector<ClusterNode> nodes_;
};

// Leaf side n0 must satisfy n = n0 * 2^L, or n <= n0 (single leaf).
ClusterTree build_cluster_tree(const UniformGrid& grid, std::size_t leaf_side);
// Splits while a node holds more than max_leaf_points points.
ClusterTree build_cluster_tree_by_count(const UniformGrid& grid, std::size_t max_leaf_points);
// Throws ConfigError naming the n = n0 * 2^L constraint if violated.
void check_refinement(std::size_t n, std::size_t leaf_side);

enum class BlockKind { kInternal, kAdmissible, kInadmissible };

struct BlockNode {
  std::size_t tau = 0;
  std::size_t sigma = 0;
  BlockKind kind = BlockKind::kInternal;
  std::int64_t first_child = -1;  // 4^d children when internal
};

class BlockClusterTree {
 public:
  BlockClusterTree(const ClusterTree& tree, const AdmissibilityRule& rule);

  const ClusterTree& tree() const { return tree_; }
  const AdmissibilityRule& rule() const { return rule_; }
  const std::vector<BlockNode>& nodes() const { return nodes_; }
  // Leaf block indices in depth-first order; fixes matvec accumulation order.
  const std::vector<std::size_t>& leaves() const { return leaves_; }

  std::size_t count(BlockKind kind) const;

 private:
  ClusterTree tree_;
  AdmissibilityRule rule_;
  std::vector<BlockNode> nodes_;
  std::vector<std::size_t> leaves_;
};

// Copies the entries of `global` (length N, grid order) inside `box` into
// `local`, which is laid out as a tensor with the box extents.
void gather_box(const UniformGrid& grid, const IndexBox& box, std::span<const double> global,
                std::span<double> local);
void scatter_add_box(const UniformGrid& grid, const IndexBox& box, std::span<const double> local,
                     std::span<double> global);
// Global linear indices of the box points in local order.
std::vector<std::size_t> box_indices(const UniformGrid& grid, const IndexBox& box);

}  // namespace htlr
