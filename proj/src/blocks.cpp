#include "htlr/blocks.hpp"

#include <cmath>
#include <string>

#include "htlr/cheb.hpp"
#include "htlr/error.hpp"
#include "htlr/simd.hpp"

namespace htlr {

namespace {

Shape box_shape(const IndexBox& box) {
  Shape s(box.d);
  for (int k = 0; k < box.d; ++k) s[k] = box.extent(k);
  return s;
}

void check_pair(const UniformGrid& grid, const IndexBox& tau, const IndexBox& sigma,
                std::size_t p) {
  if (tau.d != grid.d || sigma.d != grid.d) throw_dimension("block boxes do not match grid dimension");
  if (!is_admissible(AdmissibilityRule::weak(), domain_of(grid, tau), domain_of(grid, sigma)))
    throw ConfigError("inadmissible pair: block domains overlap");
  if (p == 0) throw ConfigError("interpolation order must be at least 1");
  for (int k = 0; k < grid.d; ++k)
    if (tau.extent(k) < p || sigma.extent(k) < p)
      throw ConfigError("interpolation order p = " + std::to_string(p) +
                        " exceeds a block side; choose leaf side n0 >= p");
}

std::vector<double> coords(const UniformGrid& grid, const IndexRange& r) {
  std::vector<double> x(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) x[i] = grid.coord(r.begin + i);
  return x;
}

DenseMatrix kron_chain(const std::vector<DenseMatrix>& f) {
  // U_d ⊗ ... ⊗ U_1 so that row/column indices run first-index-fastest.
  DenseMatrix k = f[0];
  for (std::size_t l = 1; l < f.size(); ++l) k = kron(f[l], k);
  return k;
}

void scale(std::span<double> x, double s) {
  for (double& v : x) v *= s;
}

}  // namespace

InterpolationData interpolate_block(const KernelSpec& k, const UniformGrid& grid,
                                    const IndexBox& tau, const IndexBox& sigma, std::size_t p) {
  check_pair(grid, tau, sigma, p);
  const DomainBox bt = domain_of(grid, tau), bs = domain_of(grid, sigma);
  InterpolationData out;
  std::vector<ChebGrid1D> gt, gs;
  for (int l = 0; l < grid.d; ++l) {
    gt.push_back(cheb_points(bt.lo[l], bt.hi[l], p));
    gs.push_back(cheb_points(bs.lo[l], bs.hi[l], p));
    out.u.push_back(factor_matrix(coords(grid, tau.r[l]), gt.back()));
    out.v.push_back(factor_matrix(coords(grid, sigma.r[l]), gs.back()));
  }
  out.core = core_tensor(k, gt, gs);
  return out;
}

TuckerBlock build_tlr(const KernelSpec& k, const UniformGrid& grid, const IndexBox& tau,
                      const IndexBox& sigma, std::size_t p, const BlockOptions& opts) {
  InterpolationData data = interpolate_block(k, grid, tau, sigma, p);
  const int d = grid.d;
  TuckerBlock b{tau, sigma, std::move(data.core), {}, {}};
  scale(b.core.data(), std::pow(grid.h(), d));
  auto orthogonalize = [&](const DenseMatrix& f, std::size_t mode) {
    if (opts.qrcp) {
      PivotedQRResult r = qr_pivoted(f, opts.qrcp_tol);
      b.core = mode_product(b.core, r.r, mode);
      return std::move(r.q);
    }
    QRResult r = qr(f);
    b.core = mode_product(b.core, r.r, mode);
    return std::move(r.q);
  };
  for (int l = 0; l < d; ++l) b.u.push_back(orthogonalize(data.u[l], l));
  for (int l = 0; l < d; ++l) b.v.push_back(orthogonalize(data.v[l], d + l));
  return b;
}

LowRankBlock build_lowrank(const KernelSpec& k, const UniformGrid& grid, const IndexBox& tau,
                           const IndexBox& sigma, std::size_t p, const BlockOptions& opts) {
  InterpolationData data = interpolate_block(k, grid, tau, sigma, p);
  const DenseMatrix u = kron_chain(data.u);
  const DenseMatrix v = kron_chain(data.v);
  DenseMatrix g(u.cols(), v.cols(), std::move(data.core).release());
  scale(g.data(), std::pow(grid.h(), grid.d));

  DenseMatrix qu, ru, qv, rv;
  if (opts.qrcp) {
    auto a = qr_pivoted(u, opts.qrcp_tol);
    auto c = qr_pivoted(v, opts.qrcp_tol);
    qu = std::move(a.q), ru = std::move(a.r), qv = std::move(c.q), rv = std::move(c.r);
  } else {
    auto a = qr(u);
    auto c = qr(v);
    qu = std::move(a.q), ru = std::move(a.r), qv = std::move(c.q), rv = std::move(c.r);
  }
  // G' = R_U G R_V^T
  DenseMatrix g2 = matmul(matmul(ru, g), rv.transposed());
  return LowRankBlock{tau, sigma, std::move(qu), std::move(g2), std::move(qv)};
}

DenseBlock build_dense(const NystromEntries& entries, const IndexBox& tau, const IndexBox& sigma) {
  const auto& grid = entries.grid();
  const auto ti = box_indices(grid, tau);
  const auto si = box_indices(grid, sigma);
  DenseBlock b{tau, sigma, DenseMatrix(ti.size(), si.size())};
  for (std::size_t j = 0; j < si.size(); ++j)
    for (std::size_t i = 0; i < ti.size(); ++i) b.m(i, j) = entries.entry(ti[i], si[j]);
  return b;
}

DenseMatrix materialize(const TuckerBlock& b) {
  const int d = static_cast<int>(b.u.size());
  DenseTensor t = b.core;
  for (int l = 0; l < d; ++l) t = mode_product(t, b.u[l], l);
  for (int l = 0; l < d; ++l) t = mode_product(t, b.v[l], d + l);
  return DenseMatrix(b.tau.size(), b.sigma.size(), std::move(t).release());
}

DenseMatrix materialize(const LowRankBlock& b) {
  return matmul(matmul(b.u, b.g), b.v.transposed());
}

DenseMatrix materialize(const InterpolationData& data, double weight) {
  const int d = static_cast<int>(data.u.size());
  DenseTensor t = data.core;
  for (int l = 0; l < d; ++l) t = mode_product(t, data.u[l], l);
  for (int l = 0; l < d; ++l) t = mode_product(t, data.v[l], d + l);
  std::size_t rows = 1, cols = 1;
  for (int l = 0; l < d; ++l) {
    rows *= data.u[l].rows();
    cols *= data.v[l].rows();
  }
  DenseMatrix m(rows, cols, std::move(t).release());
  scale(m.data(), weight);
  return m;
}

void tlr_apply_add(const TuckerBlock& b, std::span<const double> u_sigma, std::span<double> f_tau) {
  if (u_sigma.size() != b.sigma.size() || f_tau.size() != b.tau.size())
    throw_dimension("tlr_apply: vector length does not match block");
  const int d = static_cast<int>(b.u.size());
  DenseTensor w = vec_to_tensor(u_sigma, box_shape(b.sigma));
  for (int l = 0; l < d; ++l) w = mode_product_transposed(w, b.v[l], l);

  Shape rt(d);
  std::size_t nt = 1, ns = 1;
  for (int l = 0; l < d; ++l) {
    rt[l] = b.core.extent(l);
    nt *= rt[l];
    ns *= b.core.extent(d + l);
  }
  DenseTensor z(rt);
  simd::active().gemv_n(nt, ns, b.core.data().data(), nt, w.data().data(), z.data().data());
  for (int l = 0; l < d; ++l) z = mode_product(z, b.u[l], l);
  auto zd = z.data();
  for (std::size_t i = 0; i < f_tau.size(); ++i) f_tau[i] += zd[i];
}

void lowrank_apply_add(const LowRankBlock& b, std::span<const double> u_sigma,
                       std::span<double> f_tau) {
  if (u_sigma.size() != b.v.rows() || f_tau.size() != b.u.rows())
    throw_dimension("lowrank_apply: vector length does not match block");
  const auto& kern = simd::active();
  std::vector<double> t1(b.v.cols(), 0.0), t2(b.g.rows(), 0.0);
  kern.gemv_t(b.v.rows(), b.v.cols(), b.v.data().data(), b.v.rows(), u_sigma.data(), t1.data());
  kern.gemv_n(b.g.rows(), b.g.cols(), b.g.data().data(), b.g.rows(), t1.data(), t2.data());
  kern.gemv_n(b.u.rows(), b.u.cols(), b.u.data().data(), b.u.rows(), t2.data(), f_tau.data());
}

void dense_apply_add(const DenseBlock& b, std::span<const double> u_sigma, std::span<double> f_tau) {
  matvec_add(b.m, u_sigma, f_tau);
}

std::vector<double> tlr_apply(const TuckerBlock& b, std::span<const double> u_sigma) {
  std::vector<double> f(b.tau.size(), 0.0);
  tlr_apply_add(b, u_sigma, f);
  return f;
}

std::vector<double> lowrank_apply(const LowRankBlock& b, std::span<const double> u_sigma) {
  std::vector<double> f(b.u.rows(), 0.0);
  lowrank_apply_add(b, u_sigma, f);
  return f;
}

std::size_t factor_count(const TuckerBlock& b) {
  std::size_t s = 0;
  for (const auto& m : b.u) s += m.size();
  for (const auto& m : b.v) s += m.size();
  return s;
}

std::size_t factor_count(const LowRankBlock& b) { return b.u.size() + b.v.size(); }

std::size_t storage_count(const TuckerBlock& b) { return b.core.size() + factor_count(b); }
std::size_t storage_count(const LowRankBlock& b) { return b.g.size() + factor_count(b); }
std::size_t storage_count(const DenseBlock& b) { return b.m.size(); }

}  // namespace htlr
