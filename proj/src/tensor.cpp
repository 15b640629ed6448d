#include "htlr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "htlr/error.hpp"
#include "htlr/simd.hpp"

namespace htlr {

namespace {

std::string shape_str(std::span<const std::size_t> s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

void check_shape(const Shape& shape) {
  if (shape.empty()) throw_dimension("tensor order must be at least 1");
  for (std::size_t e : shape)
    if (e == 0) throw_dimension("tensor extents must be positive, got " + shape_str(shape));
}

// Strides under first-index-fastest linearization.
std::vector<std::size_t> strides_of(std::span<const std::size_t> shape) {
  std::vector<std::size_t> s(shape.size());
  std::size_t acc = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    s[k] = acc;
    acc *= shape[k];
  }
  return s;
}

// Shared body of mode_product / mode_product_transposed. The operator maps
// extent `in_ext` to `out_ext`; op(j, l) = mat[j * op_rs + l * op_cs].
DenseTensor apply_mode(const DenseTensor& t, const DenseMatrix& m, std::size_t mode,
                       bool transpose) {
  if (mode >= t.order())
    throw_dimension("mode " + std::to_string(mode) + " out of range for order " +
                    std::to_string(t.order()));
  const std::size_t in_ext = transpose ? m.rows() : m.cols();
  const std::size_t out_ext = transpose ? m.cols() : m.rows();
  if (in_ext != t.extent(mode))
    throw_dimension("mode product: matrix " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + " does not fit extent " +
                    std::to_string(t.extent(mode)) + " of mode " + std::to_string(mode));

  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < mode; ++k) left *= t.extent(k);
  for (std::size_t k = mode + 1; k < t.order(); ++k) right *= t.extent(k);

  Shape out_shape = t.shape();
  out_shape[mode] = out_ext;
  DenseTensor out(out_shape);
  const auto& kern = simd::active();
  const double* src = t.data().data();
  double* dst = out.data().data();

  if (left == 1) {
    // Whole tensor is an (in_ext x right) matrix: one product.
    if (transpose)
      kern.gemm_tn(out_ext, right, in_ext, m.data().data(), m.rows(), src, in_ext, dst, out_ext);
    else
      kern.gemm_n(out_ext, right, in_ext, m.data().data(), m.rows(), src, 1, in_ext, dst,
                  out_ext);
    return out;
  }

  // Each slab is a (left x in_ext) matrix multiplied on the right by op^T.
  // op^T(l, j) = op(j, l): for m as stored, rows index j when !transpose.
  const std::size_t rsb = transpose ? 1 : m.rows();
  const std::size_t csb = transpose ? m.rows() : 1;
  for (std::size_t r = 0; r < right; ++r) {
    kern.gemm_n(left, out_ext, in_ext, src + r * left * in_ext, left, m.data().data(), rsb, csb,
                dst + r * left * out_ext, left);
  }
  return out;
}

}  // namespace

std::size_t shape_size(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (shape_size(shape_) != data_.size())
    throw_dimension("shape " + shape_str(shape_) + " does not match " +
                    std::to_string(data_.size()) + " values");
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw_dimension("multi-index has wrong order");
  std::size_t lin = 0, stride = 1;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= shape_[k]) throw_dimension("multi-index out of range");
    lin += index[k] * stride;
    stride *= shape_[k];
  }
  return lin;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ * cols_ != data_.size())
    throw_dimension(std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix given " +
                    std::to_string(data_.size()) + " values");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

DenseTensor DenseMatrix::as_tensor() const { return DenseTensor({rows_, cols_}, data_); }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw_dimension("matmul: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  if (c.size() == 0 || a.cols() == 0) return c;
  simd::active().gemm_n(a.rows(), b.cols(), a.cols(), a.data().data(), a.rows(),
                        b.data().data(), 1, b.rows(), c.data().data(), c.rows());
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw_dimension("matmul_tn: row counts differ");
  DenseMatrix c(a.cols(), b.cols());
  if (c.size() == 0 || a.rows() == 0) return c;
  simd::active().gemm_tn(a.cols(), b.cols(), a.rows(), a.data().data(), a.rows(),
                         b.data().data(), b.rows(), c.data().data(), c.rows());
  return c;
}

void matvec_add(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) throw_dimension("matvec: length mismatch");
  if (a.size() == 0) return;
  simd::active().gemv_n(a.rows(), a.cols(), a.data().data(), a.rows(), x.data(), y.data());
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  matvec_add(a, x, y);
  return y;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t jb = 0; jb < b.cols(); ++jb) {
      const std::size_t col = ja * b.cols() + jb;
      for (std::size_t ia = 0; ia < a.rows(); ++ia) {
        const double s = a(ia, ja);
        for (std::size_t ib = 0; ib < b.rows(); ++ib) k(ia * b.rows() + ib, col) = s * b(ib, jb);
      }
    }
  return k;
}

double frobenius_norm(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw_dimension("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode) {
  return apply_mode(t, m, mode, false);
}

DenseTensor mode_product_transposed(const DenseTensor& t, const DenseMatrix& m,
                                    std::size_t mode) {
  return apply_mode(t, m, mode, true);
}

DenseTensor multi_mode_apply(const DenseTensor& t, std::span<const ModeFactor> factors) {
  std::vector<bool> seen(t.order(), false);
  for (const auto& f : factors) {
    if (f.mode >= t.order()) throw_dimension("multi_mode_apply: mode out of range");
    if (seen[f.mode]) throw_dimension("multi_mode_apply: repeated mode");
    seen[f.mode] = true;
  }
  DenseTensor cur = t;
  for (const auto& f : factors) cur = apply_mode(cur, f.matrix.get(), f.mode, f.transpose);
  return cur;
}

DenseTensor permute(const DenseTensor& t, std::span<const std::size_t> perm) {
  const std::size_t d = t.order();
  if (perm.size() != d) throw_dimension("permute: permutation has wrong length");
  std::vector<bool> seen(d, false);
  for (std::size_t p : perm) {
    if (p >= d || seen[p]) throw_dimension("permute: not a permutation");
    seen[p] = true;
  }
  bool identity = true;
  for (std::size_t k = 0; k < d; ++k) identity = identity && perm[k] == k;
  if (identity) return t;

  Shape out_shape(d);
  for (std::size_t k = 0; k < d; ++k) out_shape[k] = t.extent(perm[k]);
  const auto in_strides = strides_of(t.shape());
  std::vector<std::size_t> step(d);
  for (std::size_t k = 0; k < d; ++k) step[k] = in_strides[perm[k]];

  DenseTensor out(out_shape);
  auto src = t.data();
  auto dst = out.data();
  std::vector<std::size_t> idx(d, 0);
  std::size_t offset = 0;
  const std::size_t n0 = out_shape[0];
  for (std::size_t lin = 0; lin < dst.size(); lin += n0) {
    for (std::size_t i = 0; i < n0; ++i) dst[lin + i] = src[offset + i * step[0]];
    // odometer over modes 1..d-1
    for (std::size_t k = 1; k < d; ++k) {
      offset += step[k];
      if (++idx[k] < out_shape[k]) break;
      offset -= step[k] * out_shape[k];
      idx[k] = 0;
    }
  }
  return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::size_t> dims_a, std::span<const std::size_t> dims_b) {
  if (dims_a.size() != dims_b.size())
    throw_dimension("contract: dimension lists have different lengths");
  std::vector<bool> used_a(a.order(), false), used_b(b.order(), false);
  for (std::size_t k = 0; k < dims_a.size(); ++k) {
    const std::size_t da = dims_a[k], db = dims_b[k];
    if (da >= a.order() || db >= b.order()) throw_dimension("contract: dimension out of range");
    if (used_a[da] || used_b[db]) throw_dimension("contract: duplicate dimension");
    used_a[da] = used_b[db] = true;
    if (a.extent(da) != b.extent(db))
      throw_dimension("contract: extent " + std::to_string(a.extent(da)) + " vs " +
                      std::to_string(b.extent(db)));
  }

  std::vector<std::size_t> perm_a, perm_b;
  Shape out_shape;
  std::size_t free_a = 1, free_b = 1, inner = 1;
  for (std::size_t k = 0; k < a.order(); ++k)
    if (!used_a[k]) {
      perm_a.push_back(k);
      out_shape.push_back(a.extent(k));
      free_a *= a.extent(k);
    }
  for (std::size_t k : dims_a) {
    perm_a.push_back(k);
    inner *= a.extent(k);
  }
  for (std::size_t k : dims_b) perm_b.push_back(k);
  for (std::size_t k = 0; k < b.order(); ++k)
    if (!used_b[k]) {
      perm_b.push_back(k);
      out_shape.push_back(b.extent(k));
      free_b *= b.extent(k);
    }
  if (out_shape.empty()) out_shape.push_back(1);

  const DenseTensor pa = permute(a, perm_a);
  const DenseTensor pb = permute(b, perm_b);
  DenseTensor out(out_shape);
  simd::active().gemm_n(free_a, free_b, inner, pa.data().data(), free_a, pb.data().data(), 1,
                        inner, out.data().data(), free_a);
  return out;
}

DenseTensor reshape(DenseTensor t, Shape new_shape) {
  check_shape(new_shape);
  if (shape_size(new_shape) != t.size())
    throw_dimension("reshape: " + shape_str(t.shape()) + " cannot become " +
                    shape_str(new_shape));
  return DenseTensor(std::move(new_shape), std::move(t).release());
}

DenseTensor vec_to_tensor(std::span<const double> v, Shape shape) {
  check_shape(shape);
  if (shape_size(shape) != v.size())
    throw_dimension("vec_to_tensor: length " + std::to_string(v.size()) + " vs shape " +
                    shape_str(shape));
  return DenseTensor(std::move(shape), std::vector<double>(v.begin(), v.end()));
}

std::vector<double> tensor_to_vec(const DenseTensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

namespace {

// In-place Householder triangularization of w (rows x cols). On return the
// upper triangle of w holds R; reflector k is stored in v.col(k) from row k
// on, with apply[k] false when the column was already reduced.
struct Householder {
  DenseMatrix v;
  std::vector<bool> apply;
  std::vector<std::size_t> perm;
  std::size_t steps = 0;
};

Householder householder(DenseMatrix& w, bool pivot, double tol) {
  const std::size_t m = w.rows(), n = w.cols();
  const auto& kern = simd::active();
  Householder h{DenseMatrix(m, n), std::vector<bool>(n, false), std::vector<std::size_t>(n), 0};
  std::iota(h.perm.begin(), h.perm.end(), 0);
  double first_diag = 0.0;

  for (std::size_t k = 0; k < n && k < m; ++k) {
    if (pivot) {
      std::size_t best = k;
      double best_norm = -1.0;
      for (std::size_t j = k; j < n; ++j) {
        const double* c = w.data().data() + j * m + k;
        const double s = kern.dot(c, c, m - k);
        if (s > best_norm) {
          best_norm = s;
          best = j;
        }
      }
      if (best != k) {
        std::swap_ranges(w.col(k).begin(), w.col(k).end(), w.col(best).begin());
        std::swap(h.perm[k], h.perm[best]);
      }
      const double diag = std::sqrt(std::max(best_norm, 0.0));
      if (k == 0) first_diag = diag;
      if (diag <= tol * first_diag || diag == 0.0) break;
    }

    double* x = w.data().data() + k * m + k;
    const std::size_t len = m - k;
    const double tail = len > 1 ? kern.dot(x + 1, x + 1, len - 1) : 0.0;
    h.steps = k + 1;
    if (tail == 0.0) continue;  // already upper triangular in this column

    const double norm = std::sqrt(x[0] * x[0] + tail);
    const double alpha = x[0] >= 0.0 ? -norm : norm;
    double* v = h.v.data().data() + k * m + k;
    std::copy(x, x + len, v);
    v[0] -= alpha;
    const double beta = 2.0 / kern.dot(v, v, len);
    h.apply[k] = true;

    x[0] = alpha;
    std::fill(x + 1, x + len, 0.0);
    for (std::size_t j = k + 1; j < n; ++j) {
      double* c = w.data().data() + j * m + k;
      const double s = beta * kern.dot(v, c, len);
      kern.axpy(-s, v, c, len);
    }
  }
  return h;
}

// Q (rows x cols_q) = H_0 ... H_{steps-1} [I; 0].
DenseMatrix form_q(const Householder& h, std::size_t cols_q) {
  const std::size_t m = h.v.rows();
  const auto& kern = simd::active();
  DenseMatrix q(m, cols_q);
  for (std::size_t j = 0; j < cols_q; ++j) q(j, j) = 1.0;
  for (std::size_t kk = h.steps; kk-- > 0;) {
    if (!h.apply[kk]) continue;
    const double* v = h.v.data().data() + kk * m + kk;
    const std::size_t len = m - kk;
    const double beta = 2.0 / kern.dot(v, v, len);
    for (std::size_t j = kk; j < cols_q; ++j) {
      double* c = q.data().data() + j * m + kk;
      const double s = beta * kern.dot(v, c, len);
      kern.axpy(-s, v, c, len);
    }
  }
  return q;
}

}  // namespace

QRResult qr(const DenseMatrix& m) {
  if (m.rows() < m.cols())
    throw_dimension("qr: needs rows >= cols, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  const std::size_t n = m.cols();
  DenseMatrix w = m;
  const Householder h = householder(w, false, 0.0);
  QRResult out{form_q(h, n), DenseMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = w(i, j);
  // Sign convention: nonnegative diagonal of R.
  for (std::size_t k = 0; k < n; ++k) {
    if (out.r(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < n; ++j) out.r(k, j) = -out.r(k, j);
    for (double& x : out.q.col(k)) x = -x;
  }
  return out;
}

PivotedQRResult qr_pivoted(const DenseMatrix& m, double tol) {
  if (m.rows() < m.cols())
    throw_dimension("qr_pivoted: needs rows >= cols, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  const std::size_t n = m.cols();
  DenseMatrix w = m;
  Householder h = householder(w, true, tol);
  // A pivoted step that stopped early recorded steps == k+1 only when it
  // performed the reflection; the rank is the count of accepted pivots.
  std::size_t rank = 0;
  {
    const double first = n > 0 ? std::abs(w(0, 0)) : 0.0;
    while (rank < h.steps && std::abs(w(rank, rank)) > tol * first && w(rank, rank) != 0.0)
      ++rank;
  }
  h.steps = rank;
  PivotedQRResult out;
  out.q = form_q(h, rank);
  out.r = DenseMatrix(rank, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < rank && i <= j; ++i) out.r(i, h.perm[j]) = w(i, j);
  out.perm = h.perm;
  out.rank = rank;
  return out;
}

}  // namespace htlr
