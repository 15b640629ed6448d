#pragma once

// Hand-rolled generators and loop-based reference helpers shared by the
// test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "htlr/tensor.hpp"

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  htlr::DenseMatrix matrix(std::size_t r, std::size_t c) { return htlr::DenseMatrix(r, c, vec(r * c)); }
  htlr::DenseTensor tensor(htlr::Shape s) {
    const std::size_t n = htlr::shape_size(s);
    return htlr::DenseTensor(std::move(s), vec(n));
  }
  htlr::Shape shape(std::size_t order, std::size_t max_extent) {
    htlr::Shape s(order);
    for (auto& e : s) e = index(1, max_extent);
    return s;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Multi-index of a first-index-fastest linear position.
inline std::vector<std::size_t> unravel(std::size_t lin, const htlr::Shape& s) {
  std::vector<std::size_t> idx(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    idx[k] = lin % s[k];
    lin /= s[k];
  }
  return idx;
}

inline std::size_t ravel(const std::vector<std::size_t>& idx, const htlr::Shape& s) {
  std::size_t lin = 0, stride = 1;
  for (std::size_t k = 0; k < s.size(); ++k) {
    lin += idx[k] * stride;
    stride *= s[k];
  }
  return lin;
}

// Mode product by explicit loops over every entry.
inline htlr::DenseTensor loop_mode_product(const htlr::DenseTensor& t, const htlr::DenseMatrix& m,
                                           std::size_t mode) {
  htlr::Shape out_shape = t.shape();
  out_shape[mode] = m.rows();
  htlr::DenseTensor out(out_shape);
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    auto idx = unravel(lin, out_shape);
    const std::size_t row = idx[mode];
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      idx[mode] = j;
      s += m(row, j) * t[ravel(idx, t.shape())];
    }
    out[lin] = s;
  }
  return out;
}

}  // namespace testing_support
