#include "htlr/htlr.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "htlr/error.hpp"

namespace htlr {

std::vector<std::string> config_warnings(const BuildConfig& cfg) {
  std::vector<std::string> w;
  if (cfg.leaf < cfg.p || cfg.leaf > 2 * cfg.p)
    w.push_back("leaf side " + std::to_string(cfg.leaf) + " is outside [p, 2p] = [" +
                std::to_string(cfg.p) + ", " + std::to_string(2 * cfg.p) +
                "]; the O(N) storage estimate assumes it is inside");
  return w;
}

namespace {

// Runs body(i) for i in [0, count) over `threads` static contiguous chunks.
template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
  const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(nt);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = count * t / nt, hi = count * (t + 1) / nt;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

LowRankBlock build_admissible(const LowRankBlock*, const BuildConfig& cfg, const UniformGrid& g,
                              const IndexBox& t, const IndexBox& s) {
  return build_lowrank(cfg.kernel, g, t, s, cfg.p, cfg.block);
}

TuckerBlock build_admissible(const TuckerBlock*, const BuildConfig& cfg, const UniformGrid& g,
                             const IndexBox& t, const IndexBox& s) {
  return build_tlr(cfg.kernel, g, t, s, cfg.p, cfg.block);
}

template <class LowRank>
HierarchicalMatrix<LowRank> construct_impl(const BuildConfig& cfg, const UniformGrid& grid) {
  if (cfg.kernel.required_dim() != 0 && cfg.kernel.required_dim() != grid.d)
    throw ConfigError("kernel " + cfg.kernel.name + " requires dimension " +
                      std::to_string(cfg.kernel.required_dim()));
  if (cfg.p == 0) throw ConfigError("p must be positive");
  if (grid.n > cfg.leaf && cfg.p > cfg.leaf)
    throw ConfigError("p = " + std::to_string(cfg.p) + " exceeds the leaf side " +
                      std::to_string(cfg.leaf));
  ClusterTree tree = build_cluster_tree(grid, cfg.leaf);
  HierarchicalMatrix<LowRank> a{grid, cfg, BlockClusterTree(tree, cfg.rule), {}, {}, {}};
  const NystromEntries entries(cfg.kernel, cfg.coeff, grid, cfg.quadrature);

  const auto& nodes = a.blocks.nodes();
  const auto& ct = a.blocks.tree();
  for (std::size_t node : a.blocks.leaves()) {
    const bool adm = nodes[node].kind == BlockKind::kAdmissible;
    std::size_t idx = 0;
    if (adm) {
      idx = a.lowrank.size();
      a.lowrank.emplace_back();
    } else {
      idx = a.dense.size();
      a.dense.emplace_back();
    }
    a.leaves.push_back({node, adm, idx});
  }

  parallel_for(a.leaves.size(), cfg.threads, [&](std::size_t i, std::size_t) {
    const auto& leaf = a.leaves[i];
    const IndexBox& t = ct.node(nodes[leaf.node].tau).box;
    const IndexBox& s = ct.node(nodes[leaf.node].sigma).box;
    if (leaf.admissible)
      a.lowrank[leaf.payload] = build_admissible(static_cast<const LowRank*>(nullptr), cfg, grid, t, s);
    else
      a.dense[leaf.payload] = build_dense(entries, t, s);
  });
  return a;
}

struct Workspace {
  std::vector<double> u_local, f_local;
};

void apply_payload(const TuckerBlock& b, std::span<const double> u, std::span<double> f) {
  tlr_apply_add(b, u, f);
}
void apply_payload(const LowRankBlock& b, std::span<const double> u, std::span<double> f) {
  lowrank_apply_add(b, u, f);
}

template <class LowRank>
void apply_leaf(const HierarchicalMatrix<LowRank>& a, std::size_t i, std::span<const double> u,
                std::span<double> f, Workspace& ws) {
  const auto& leaf = a.leaves[i];
  const auto& node = a.blocks.nodes()[leaf.node];
  const IndexBox& t = a.blocks.tree().node(node.tau).box;
  const IndexBox& s = a.blocks.tree().node(node.sigma).box;
  ws.u_local.resize(s.size());
  ws.f_local.assign(t.size(), 0.0);
  gather_box(a.grid, s, u, ws.u_local);
  if (leaf.admissible)
    apply_payload(a.lowrank[leaf.payload], ws.u_local, ws.f_local);
  else
    dense_apply_add(a.dense[leaf.payload], ws.u_local, ws.f_local);
  scatter_add_box(a.grid, t, ws.f_local, f);
}

template <class LowRank>
std::vector<double> matvec_impl(const HierarchicalMatrix<LowRank>& a, std::span<const double> u,
                                int threads) {
  const std::size_t N = a.size();
  if (u.size() != N)
    throw_dimension("matvec: vector length " + std::to_string(u.size()) + " vs operator size " +
                    std::to_string(N));
  std::vector<double> f(N, 0.0);
  const std::size_t nt =
      std::max<std::size_t>(1, std::min<std::size_t>(std::max(threads, 1), a.leaves.size()));
  if (nt == 1) {
    Workspace ws;
    for (std::size_t i = 0; i < a.leaves.size(); ++i) apply_leaf(a, i, u, f, ws);
    return f;
  }
  // Per-thread partial outputs, merged in thread order.
  std::vector<std::vector<double>> partial(nt, std::vector<double>(N, 0.0));
  std::vector<Workspace> ws(nt);
  parallel_for(a.leaves.size(), static_cast<int>(nt),
               [&](std::size_t i, std::size_t t) { apply_leaf(a, i, u, partial[t], ws[t]); });
  for (const auto& p : partial)
    for (std::size_t i = 0; i < N; ++i) f[i] += p[i];
  return f;
}

template <class LowRank>
DenseMatrix materialize_impl(const HierarchicalMatrix<LowRank>& a) {
  const std::size_t N = a.size();
  DenseMatrix m(N, N);
  for (const auto& leaf : a.leaves) {
    const auto& node = a.blocks.nodes()[leaf.node];
    const IndexBox& t = a.blocks.tree().node(node.tau).box;
    const IndexBox& s = a.blocks.tree().node(node.sigma).box;
    const DenseMatrix b = leaf.admissible ? materialize(a.lowrank[leaf.payload]) : a.dense[leaf.payload].m;
    const auto ti = box_indices(a.grid, t), si = box_indices(a.grid, s);
    for (std::size_t j = 0; j < si.size(); ++j)
      for (std::size_t i = 0; i < ti.size(); ++i) m(ti[i], si[j]) = b(i, j);
  }
  return m;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

template <class LowRank>
StorageReport storage_common(const HierarchicalMatrix<LowRank>& a) {
  StorageReport r;
  for (const auto& b : a.dense) r.dense_scalars += storage_count(b);
  for (const auto& b : a.lowrank) {
    const std::size_t f = factor_count(b);
    r.factor_scalars += f;
    r.core_scalars += storage_count(b) - f;
  }
  r.total_scalars = r.dense_scalars + r.factor_scalars + r.core_scalars;
  return r;
}

std::size_t mode_chain_cost(Shape shape, const std::vector<DenseMatrix>& f, bool transpose) {
  std::size_t cost = 0;
  for (std::size_t l = 0; l < f.size(); ++l) {
    const std::size_t out = transpose ? f[l].cols() : f[l].rows();
    const std::size_t in = transpose ? f[l].rows() : f[l].cols();
    cost += shape_size(shape) / in * out * in;
    shape[l] = out;
  }
  return cost;
}

std::size_t leaf_cost(const TuckerBlock& b) {
  const int d = static_cast<int>(b.u.size());
  Shape s(d), rt(d);
  std::size_t nt = 1, ns = 1;
  for (int l = 0; l < d; ++l) {
    s[l] = b.sigma.extent(l);
    rt[l] = b.core.extent(l);
    nt *= rt[l];
    ns *= b.core.extent(d + l);
  }
  return mode_chain_cost(s, b.v, true) + nt * ns + mode_chain_cost(rt, b.u, false);
}

std::size_t leaf_cost(const LowRankBlock& b) { return b.v.size() + b.g.size() + b.u.size(); }

template <class LowRank>
std::size_t apply_cost_impl(const HierarchicalMatrix<LowRank>& a) {
  std::size_t c = 0;
  for (const auto& b : a.dense) c += b.m.size();
  for (const auto& b : a.lowrank) c += leaf_cost(b);
  return c;
}

template <class LowRank>
double estimate_impl(const HierarchicalMatrix<LowRank>& a, const NystromEntries& exact,
                     std::span<const double> u, std::size_t sample, std::uint64_t seed,
                     std::vector<double> (*mv)(const HierarchicalMatrix<LowRank>&,
                                               std::span<const double>, int)) {
  const std::vector<double> approx = mv(a, u, a.config.threads);
  return estimate_rel_error_random(
      approx, [&](std::size_t i) { return exact.row_dot(i, u); }, sample, seed);
}

}  // namespace

HTLRMatrix construct(const BuildConfig& cfg, const UniformGrid& grid) {
  return construct_impl<TuckerBlock>(cfg, grid);
}

HMatrix construct_hmatrix(const BuildConfig& cfg, const UniformGrid& grid) {
  return construct_impl<LowRankBlock>(cfg, grid);
}

std::vector<double> matvec(const HTLRMatrix& a, std::span<const double> u, int threads) {
  return matvec_impl(a, u, threads);
}

std::vector<double> hmatrix_matvec(const HMatrix& a, std::span<const double> u, int threads) {
  return matvec_impl(a, u, threads);
}

DenseMatrix materialize(const HTLRMatrix& a) { return materialize_impl(a); }
DenseMatrix materialize(const HMatrix& a) { return materialize_impl(a); }

double htlr_storage_bound(int d, std::size_t p, std::size_t N, const AdmissibilityRule& rule) {
  if (rule.kind != AdmissibilityRule::Kind::kWeak) return std::numeric_limits<double>::quiet_NaN();
  const double pd = std::pow(static_cast<double>(p), d);
  return (16.0 * d * std::pow(static_cast<double>(p), 2 - d) + pd + std::pow(2.0, d) * pd) *
         static_cast<double>(N);
}

double hmatrix_storage_bound(int d, std::size_t p, std::size_t N, std::size_t N0,
                             const AdmissibilityRule& rule) {
  if (rule.kind != AdmissibilityRule::Kind::kWeak) return std::numeric_limits<double>::quiet_NaN();
  const double pd = std::pow(static_cast<double>(p), d);
  const double levels = N > N0 ? std::log2(static_cast<double>(N) / static_cast<double>(N0)) : 0.0;
  return (std::pow(2.0, d) * pd * levels / d + pd + std::pow(2.0, d) * pd) * static_cast<double>(N);
}

StorageReport storage_report(const HTLRMatrix& a) {
  StorageReport r = storage_common(a);
  r.theoretical_bound = htlr_storage_bound(a.grid.d, a.config.p, a.size(), a.config.rule);
  return r;
}

StorageReport storage_report(const HMatrix& a) {
  StorageReport r = storage_common(a);
  r.theoretical_bound = hmatrix_storage_bound(a.grid.d, a.config.p, a.size(),
                                              ipow(a.config.leaf, a.grid.d), a.config.rule);
  return r;
}

std::size_t apply_cost(const HTLRMatrix& a) { return apply_cost_impl(a); }
std::size_t apply_cost(const HMatrix& a) { return apply_cost_impl(a); }

std::vector<std::size_t> sample_rows(std::size_t N, std::size_t count, std::uint64_t seed) {
  if (count > N) throw ConfigError("sample size exceeds the number of rows");
  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, N - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

double sampled_rel_error(std::span<const double> approx, const RowOracle& exact,
                         std::span<const std::size_t> rows) {
  double num = 0.0, den = 0.0;
  for (std::size_t i : rows) {
    const double e = exact(i);
    num += (approx[i] - e) * (approx[i] - e);
    den += e * e;
  }
  if (den == 0.0) throw UndefinedErrorMeasure("exact values vanish on the sampled rows");
  return std::sqrt(num / den);
}

double estimate_rel_error_random(std::span<const double> approx, const RowOracle& exact,
                                 std::size_t sample_size, std::uint64_t seed) {
  const auto rows = sample_rows(approx.size(), std::min(sample_size, approx.size()), seed);
  return sampled_rel_error(approx, exact, rows);
}

double estimate_rel_error_random(const HTLRMatrix& a, const NystromEntries& exact,
                                 std::span<const double> u, std::size_t sample_size,
                                 std::uint64_t seed) {
  return estimate_impl(a, exact, u, sample_size, seed, &matvec);
}

double estimate_rel_error_random(const HMatrix& a, const NystromEntries& exact,
                                 std::span<const double> u, std::size_t sample_size,
                                 std::uint64_t seed) {
  return estimate_impl(a, exact, u, sample_size, seed, &hmatrix_matvec);
}

}  // namespace htlr
