#include "htlr/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "htlr/error.hpp"

namespace htlr {

namespace {

using EigenMap = Eigen::Map<const Eigen::MatrixXd>;

EigenMap as_eigen(const DenseMatrix& m) {
  return EigenMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  std::copy(m.data(), m.data() + m.size(), out.data().begin());
  return out;
}

}  // namespace

DenseOperator dense_assemble(const NystromEntries& entries, std::size_t max_n) {
  const std::size_t N = entries.grid().num_points();
  if (N > max_n)
    throw ConfigError("dense assembly of N = " + std::to_string(N) + " exceeds the limit " +
                      std::to_string(max_n));
  DenseOperator op{DenseMatrix(N, N)};
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) op.matrix(i, j) = entries.entry(i, j);
  return op;
}

std::vector<double> direct_matvec(const NystromEntries& entries, std::span<const double> u,
                                  int threads) {
  const std::size_t N = entries.grid().num_points();
  if (u.size() != N) throw_dimension("direct_matvec: vector length mismatch");
  std::vector<double> f(N);
  const std::size_t nt = static_cast<std::size_t>(std::max(1, threads));
  if (nt == 1) {
    for (std::size_t i = 0; i < N; ++i) f[i] = entries.row_dot(i, u);
    return f;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = N * t / nt; i < N * (t + 1) / nt; ++i) f[i] = entries.row_dot(i, u);
    });
  for (auto& th : pool) th.join();
  return f;
}

std::vector<double> singular_values(const DenseMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(m));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double tail_rel_error(std::span<const double> spectrum, std::size_t r) {
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double e = spectrum[i] * spectrum[i];
    total += e;
    if (i >= r) tail += e;
  }
  if (total == 0.0) throw UndefinedErrorMeasure("zero matrix has no relative error");
  return std::sqrt(tail / total);
}

SvdResult svd_lowrank(const DenseMatrix& m, std::size_t r) {
  const std::size_t k = std::min(m.rows(), m.cols());
  if (r == 0 || r > k)
    throw ConfigError("svd rank " + std::to_string(r) + " outside [1, " + std::to_string(k) + "]");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  SvdResult out;
  out.spectrum.assign(s.data(), s.data() + s.size());
  out.s.assign(s.data(), s.data() + r);
  const auto ri = static_cast<Eigen::Index>(r);
  out.u = from_eigen(svd.matrixU().leftCols(ri));
  out.v = from_eigen(svd.matrixV().leftCols(ri));
  out.rel_error = tail_rel_error(out.spectrum, r);
  return out;
}

TuckerDecomposition sthosvd(const DenseTensor& t, std::span<const std::size_t> ranks) {
  const std::size_t d = t.order();
  if (ranks.size() != d) throw ConfigError("sthosvd needs one rank per mode");
  for (std::size_t k = 0; k < d; ++k)
    if (ranks[k] == 0 || ranks[k] > t.extent(k))
      throw ConfigError("sthosvd rank " + std::to_string(ranks[k]) + " invalid for extent " +
                        std::to_string(t.extent(k)));
  TuckerDecomposition out;
  DenseTensor core = t;
  for (std::size_t k = 0; k < d; ++k) {
    // Mode-k unfolding: bring mode k to the front.
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k),
                perm.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    const DenseTensor front = permute(core, perm);
    const std::size_t rows = core.extent(k);
    const std::size_t cols = core.size() / rows;
    const EigenMap unfold(front.data().data(), static_cast<Eigen::Index>(rows),
                          static_cast<Eigen::Index>(cols));
    Eigen::MatrixXd uk;
    Eigen::VectorXd s;
    if (cols >= rows) {
      // Left singular vectors of a wide matrix: SVD of the transpose keeps
      // the thin factor small.
      Eigen::BDCSVD<Eigen::MatrixXd> svd(unfold.transpose(), Eigen::ComputeThinV);
      uk = svd.matrixV();
      s = svd.singularValues();
    } else {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(unfold, Eigen::ComputeThinU);
      uk = svd.matrixU();
      s = svd.singularValues();
    }
    for (Eigen::Index i = static_cast<Eigen::Index>(ranks[k]); i < s.size(); ++i)
      out.discarded_energy += s[i] * s[i];
    DenseMatrix f = from_eigen(uk.leftCols(static_cast<Eigen::Index>(ranks[k])));
    core = mode_product_transposed(core, f, k);
    out.factors.push_back(std::move(f));
  }
  out.core = std::move(core);
  return out;
}

DenseTensor tucker_reconstruct(const TuckerDecomposition& t) {
  DenseTensor r = t.core;
  for (std::size_t k = 0; k < t.factors.size(); ++k) r = mode_product(r, t.factors[k], k);
  return r;
}

double rel_fro_error(std::span<const double> approx, std::span<const double> exact) {
  if (approx.size() != exact.size()) throw_dimension("rel_fro_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num += (approx[i] - exact[i]) * (approx[i] - exact[i]);
    den += exact[i] * exact[i];
  }
  if (den == 0.0) throw UndefinedErrorMeasure("reference has zero norm");
  return std::sqrt(num / den);
}

}  // namespace htlr
