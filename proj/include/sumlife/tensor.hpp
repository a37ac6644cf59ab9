#pragma once

// Row-major double tensors, sparse matrices and the dense operations the
// classifiers are built from. Dense products go through the active kernel
// table, so results do not depend on which SIMD variant is selected.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sumlife/features.hpp"
#include "sumlife/rng.hpp"

namespace sumlife::nn {

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Same shape and same bit patterns.
bool bit_equal(const Tensor& a, const Tensor& b);

/// Throws NumericalError naming `what` when any entry is NaN or infinite.
void check_finite(const Tensor& t, std::string_view what);

/// Sparse matrix in CSR form with explicit values.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;
};

Tensor matmul(const Tensor& a, const Tensor& b);     // a · b
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // aᵀ · b
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a · bᵀ
Tensor transpose(const Tensor& a);

/// x · w for a multi-hot x. Columns of x beyond w.rows() are ignored.
Tensor spmm(const learn::FeatureMatrix& x, const Tensor& w);
/// Adds xᵀ · g into dw (dw.rows() = input width).
void spmm_t_accumulate(const learn::FeatureMatrix& x, const Tensor& g, Tensor& dw);

Tensor spmm(const CsrMatrix& a, const Tensor& b);    // a · b
Tensor spmm_t(const CsrMatrix& a, const Tensor& b);  // aᵀ · b

void add_row_vector(Tensor& t, const Tensor& bias);  // bias is 1 × cols
Tensor column_sums(const Tensor& t);                 // 1 × cols
void add_into(Tensor& dst, const Tensor& src);       // dst += src

Tensor relu(const Tensor& x);
/// dy masked by x > 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);
Tensor hadamard(const Tensor& a, const Tensor& b);

/// GELU, tanh approximation: 0.5 x (1 + tanh(√(2/π) (x + 0.044715 x³))).
double gelu(double x);
double gelu_derivative(double x);

/// Inverted-dropout mask: entries 0 or 1/(1-rate). rate 0 gives all ones.
Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

/// Glorot-uniform fill in row-major order: U(-l, l), l = √(6/(fan_in+fan_out)).
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace sumlife::nn
