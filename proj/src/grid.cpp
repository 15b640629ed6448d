#include "htlr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "htlr/error.hpp"

namespace htlr {

std::size_t UniformGrid::num_points() const {
  std::size_t N = 1;
  for (int k = 0; k < d; ++k) N *= n;
  return N;
}

Point UniformGrid::point(std::size_t linear) const {
  Point x{};
  for (int k = 0; k < d; ++k) {
    x[k] = coord(linear % n);
    linear /= n;
  }
  return x;
}

UniformGrid make_grid(int d, std::size_t n) {
  if (d != 2 && d != 3) throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(d));
  if (n == 0) throw ConfigError("grid needs at least one point per direction");
  return UniformGrid{d, n};
}

std::size_t IndexBox::size() const {
  std::size_t s = 1;
  for (int k = 0; k < d; ++k) s *= r[k].size();
  return s;
}

IndexBox full_box(const UniformGrid& grid) {
  IndexBox b;
  b.d = grid.d;
  for (int k = 0; k < grid.d; ++k) b.r[k] = {0, grid.n};
  return b;
}

double DomainBox::diameter() const {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(s);
}

DomainBox domain_of(const UniformGrid& grid, const IndexBox& box) {
  DomainBox b;
  b.d = grid.d;
  const double n = static_cast<double>(grid.n);
  for (int k = 0; k < grid.d; ++k) {
    if (box.r[k].begin >= box.r[k].end || box.r[k].end > grid.n)
      throw_dimension("index box outside grid");
    b.lo[k] = static_cast<double>(box.r[k].begin) / n;
    b.hi[k] = static_cast<double>(box.r[k].end) / n;
  }
  return b;
}

double box_distance(const DomainBox& a, const DomainBox& b) {
  double s = 0.0;
  for (int k = 0; k < a.d; ++k) {
    const double gap = std::max({0.0, b.lo[k] - a.hi[k], a.lo[k] - b.hi[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

AdmissibilityRule AdmissibilityRule::strong(double eta) {
  if (!(eta > 0.0)) throw ConfigError("strong admissibility needs eta > 0");
  return {Kind::kStrong, eta};
}

bool is_admissible(const AdmissibilityRule& rule, const DomainBox& a, const DomainBox& b) {
  if (rule.kind == AdmissibilityRule::Kind::kWeak) {
    for (int k = 0; k < a.d; ++k)
      if (std::min(a.hi[k], b.hi[k]) <= std::max(a.lo[k], b.lo[k])) return true;
    return false;
  }
  const double dist = box_distance(a, b);
  if (dist <= 0.0) return false;
  return std::max(a.diameter(), b.diameter()) <= rule.eta * dist * (1.0 + 1e-12);
}

void check_refinement(std::size_t n, std::size_t leaf_side) {
  if (leaf_side == 0) throw ConfigError("leaf side must be positive");
  if (n <= leaf_side) return;
  std::size_t s = leaf_side;
  while (s < n) s *= 2;
  if (s != n)
    throw ConfigError("n = " + std::to_string(n) + " is not of the form n0 * 2^L with leaf side n0 = " +
                      std::to_string(leaf_side));
}

ClusterTree::ClusterTree(const UniformGrid& grid, std::size_t leaf_side)
    : grid_(grid), leaf_side_(leaf_side) {
  check_refinement(grid.n, leaf_side);
  const int nc = 1 << grid.d;
  nodes_.push_back({full_box(grid), 0, -1, -1});
  // Breadth-first: each level is contiguous.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const IndexBox box = nodes_[i].box;
    if (box.r[0].size() <= leaf_side) continue;
    const int level = nodes_[i].level + 1;
    depth_ = std::max(depth_, level);
    nodes_[i].first_child = static_cast<std::int64_t>(nodes_.size());
    for (int c = 0; c < nc; ++c) {
      IndexBox child = box;
      for (int k = 0; k < grid.d; ++k) {
        const std::size_t mid = box.r[k].begin + box.r[k].size() / 2;
        child.r[k] = (c >> k) & 1 ? IndexRange{mid, box.r[k].end} : IndexRange{box.r[k].begin, mid};
      }
      nodes_.push_back({child, level, static_cast<std::int64_t>(i), -1});
    }
  }
}

std::vector<std::size_t> ClusterTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_leaf()) out.push_back(i);
  return out;
}

ClusterTree build_cluster_tree(const UniformGrid& grid, std::size_t leaf_side) {
  return ClusterTree(grid, leaf_side);
}

ClusterTree build_cluster_tree_by_count(const UniformGrid& grid, std::size_t max_leaf_points) {
  if (max_leaf_points == 0) throw ConfigError("leaf point threshold must be positive");
  std::size_t side = grid.n;
  auto count = [&](std::size_t s) {
    std::size_t c = 1;
    for (int k = 0; k < grid.d; ++k) c *= s;
    return c;
  };
  while (count(side) > max_leaf_points) {
    if (side % 2 != 0)
      throw ConfigError("n = " + std::to_string(grid.n) +
                        " cannot be halved down to the requested leaf size");
    side /= 2;
  }
  return ClusterTree(grid, side);
}

BlockClusterTree::BlockClusterTree(const ClusterTree& tree, const AdmissibilityRule& rule)
    : tree_(tree), rule_(rule) {
  const auto& grid = tree.grid();
  const int nc = tree.num_children();
  nodes_.push_back({0, 0, BlockKind::kInternal, -1});
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ClusterNode& t = tree.node(nodes_[i].tau);
    const ClusterNode& s = tree.node(nodes_[i].sigma);
    if (is_admissible(rule, domain_of(grid, t.box), domain_of(grid, s.box))) {
      nodes_[i].kind = BlockKind::kAdmissible;
      continue;
    }
    if (t.is_leaf() || s.is_leaf()) {
      // Balanced tree: both sides reach the leaf level together.
      if (!(t.is_leaf() && s.is_leaf()))
        throw ConfigError("unbalanced cluster tree: mixed leaf/internal block");
      nodes_[i].kind = BlockKind::kInadmissible;
      continue;
    }
    nodes_[i].first_child = static_cast<std::int64_t>(nodes_.size());
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b)
        nodes_.push_back({static_cast<std::size_t>(t.first_child + a),
                          static_cast<std::size_t>(s.first_child + b), BlockKind::kInternal, -1});
  }
  // Depth-first leaf order.
  std::vector<std::size_t> stack{0};
  const std::size_t nchild = static_cast<std::size_t>(nc) * nc;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (nodes_[i].kind != BlockKind::kInternal) {
      leaves_.push_back(i);
      continue;
    }
    for (std::size_t c = nchild; c-- > 0;) stack.push_back(nodes_[i].first_child + c);
  }
}

std::size_t BlockClusterTree::count(BlockKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const BlockNode& b) { return b.kind == kind; }));
}

namespace {

template <class F>
void for_each_run(const UniformGrid& grid, const IndexBox& box, F&& f) {
  const std::size_t n = grid.n;
  const std::size_t run = box.r[0].size();
  std::size_t local = 0;
  if (grid.d == 2) {
    for (std::size_t j = box.r[1].begin; j < box.r[1].end; ++j, local += run)
      f(box.r[0].begin + n * j, local, run);
  } else {
    for (std::size_t k = box.r[2].begin; k < box.r[2].end; ++k)
      for (std::size_t j = box.r[1].begin; j < box.r[1].end; ++j, local += run)
        f(box.r[0].begin + n * (j + n * k), local, run);
  }
}

}  // namespace

void gather_box(const UniformGrid& grid, const IndexBox& box, std::span<const double> global,
                std::span<double> local) {
  if (local.size() != box.size() || global.size() != grid.num_points())
    throw_dimension("gather_box: length mismatch");
  for_each_run(grid, box, [&](std::size_t g, std::size_t l, std::size_t len) {
    std::copy(global.begin() + g, global.begin() + g + len, local.begin() + l);
  });
}

void scatter_add_box(const UniformGrid& grid, const IndexBox& box, std::span<const double> local,
                     std::span<double> global) {
  if (local.size() != box.size() || global.size() != grid.num_points())
    throw_dimension("scatter_add_box: length mismatch");
  for_each_run(grid, box, [&](std::size_t g, std::size_t l, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) global[g + i] += local[l + i];
  });
}

std::vector<std::size_t> box_indices(const UniformGrid& grid, const IndexBox& box) {
  std::vector<std::size_t> idx(box.size());
  for_each_run(grid, box, [&](std::size_t g, std::size_t l, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) idx[l + i] = g + i;
  });
  return idx;
}

}  // namespace htlr
