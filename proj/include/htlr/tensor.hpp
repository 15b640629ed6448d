#pragma once

// Dense tensors and matrices with a single, global linearization: the
// first index varies fastest (matrices are column-major). Reshapes are
// therefore pure metadata changes, and a vector over a tensor grid can be
// viewed as an order-d tensor without copying.
//
// Modes are 0-based throughout the C++ API.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace htlr {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(std::span<const std::size_t> shape);

class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  std::size_t order() const { return shape_.size(); }
  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double> release() && { return std::move(data_); }

  double& operator[](std::size_t linear) { return data_[linear]; }
  double operator[](std::size_t linear) const { return data_[linear]; }

  std::size_t linear_index(std::span<const std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index) {
    return data_[linear_index({index.begin(), index.size()})];
  }
  double at(std::initializer_list<std::size_t> index) const {
    return data_[linear_index({index.begin(), index.size()})];
  }

  bool operator==(const DenseTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  DenseMatrix transposed() const;
  DenseTensor as_tensor() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // a^T b
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
// y += a * x
void matvec_add(const DenseMatrix& a, std::span<const double> x, std::span<double> y);

// Kronecker product a ⊗ b.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(std::span<const double> values);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// t ×_mode m: the extent at `mode` becomes rows(m).
DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode);
// t ×_mode m^T without materializing the transpose: extent becomes cols(m).
DenseTensor mode_product_transposed(const DenseTensor& t, const DenseMatrix& m, std::size_t mode);

struct ModeFactor {
  std::reference_wrapper<const DenseMatrix> matrix;
  std::size_t mode;
  bool transpose = false;
};

// Successive mode products; equal to the Kronecker-structured operator
// acting on the linearized tensor.
DenseTensor multi_mode_apply(const DenseTensor& t, std::span<const ModeFactor> factors);

// Result mode k is input mode perm[k].
DenseTensor permute(const DenseTensor& t, std::span<const std::size_t> perm);

// Contracts dims_a[k] of a with dims_b[k] of b. Free modes of a come first,
// then free modes of b, each in original order. A full contraction yields a
// tensor of shape {1}.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::size_t> dims_a, std::span<const std::size_t> dims_b);

DenseTensor reshape(DenseTensor t, Shape new_shape);
DenseTensor vec_to_tensor(std::span<const double> v, Shape shape);
std::vector<double> tensor_to_vec(const DenseTensor& t);

struct QRResult {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

// Thin Householder QR; requires rows >= cols.
QRResult qr(const DenseMatrix& m);

struct PivotedQRResult {
  DenseMatrix q;                  // rows x rank
  DenseMatrix r;                  // rank x cols, columns in original order: m ≈ q r
  std::vector<std::size_t> perm;  // pivot order
  std::size_t rank = 0;
};

// Householder QR with column pivoting, truncated where |R_kk| <= tol |R_00|.
PivotedQRResult qr_pivoted(const DenseMatrix& m, double tol);

}  // namespace htlr
