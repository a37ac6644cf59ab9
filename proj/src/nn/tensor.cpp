#include <cmath>
#include <cstring>
#include <algorithm>
#include <stdexcept>
#include <string>

#include "sumlife/common.hpp"
#include "sumlife/kernels.hpp"
#include "sumlife/tensor.hpp"

namespace sumlife::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("shape mismatch in ") + what);
}

}  // namespace

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.size() == 0 || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

void check_finite(const Tensor& t, std::string_view what) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t.data()[i])) {
      throw NumericalError("non-finite value in " + std::string(what) + " at (" +
                           std::to_string(i / std::max<std::size_t>(t.cols(), 1)) + ", " +
                           std::to_string(i % std::max<std::size_t>(t.cols(), 1)) + ")");
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul");
  Tensor c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), "matmul_tn");
  Tensor c(a.cols(), b.cols());
  kernels::active().gemm_tn(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.cols(), "matmul_nt");
  return matmul(a, transpose(b));
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  }
  return t;
}

Tensor spmm(const learn::FeatureMatrix& x, const Tensor& w) {
  Tensor out(x.rows(), w.cols());
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (auto c : x.row(r)) {
      if (c < w.rows()) axpy(w.cols(), 1.0, w.row(c), out.row(r));
    }
  }
  return out;
}

void spmm_t_accumulate(const learn::FeatureMatrix& x, const Tensor& g, Tensor& dw) {
  require(x.rows() == g.rows() && g.cols() == dw.cols(), "spmm_t_accumulate");
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (auto c : x.row(r)) {
      if (c < dw.rows()) axpy(g.cols(), 1.0, g.row(r), dw.row(c));
    }
  }
}

Tensor spmm(const CsrMatrix& a, const Tensor& b) {
  require(a.cols == b.rows(), "spmm");
  Tensor out(a.rows, b.cols());
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (auto i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) axpy(b.cols(), a.val[i], b.row(a.col[i]), out.row(r));
  }
  return out;
}

Tensor spmm_t(const CsrMatrix& a, const Tensor& b) {
  require(a.rows == b.rows(), "spmm_t");
  Tensor out(a.cols, b.cols());
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (auto i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) axpy(b.cols(), a.val[i], b.row(r), out.row(a.col[i]));
  }
  return out;
}

void add_row_vector(Tensor& t, const Tensor& bias) {
  require(bias.rows() == 1 && bias.cols() == t.cols(), "add_row_vector");
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < t.rows(); ++r) axpy(t.cols(), 1.0, bias.data(), t.row(r));
}

Tensor column_sums(const Tensor& t) {
  Tensor s(1, t.cols());
  const auto axpy = kernels::active().axpy;
  for (std::size_t r = 0; r < t.rows(); ++r) axpy(t.cols(), 1.0, t.row(r), s.data());
  return s;
}

void add_into(Tensor& dst, const Tensor& src) {
  require(dst.rows() == src.rows() && dst.cols() == src.cols(), "add_into");
  kernels::active().axpy(dst.size(), 1.0, src.data(), dst.data());
}

Tensor relu(const Tensor& x) {
  Tensor y(x.rows(), x.cols());
  kernels::active().relu_forward(x.size(), x.data(), y.data());
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  require(x.rows() == dy.rows() && x.cols() == dy.cols(), "relu_backward");
  Tensor dx(x.rows(), x.cols());
  kernels::active().relu_backward(x.size(), x.data(), dy.data(), dx.data());
  return dx;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "hadamard");
  Tensor out(a.rows(), a.cols());
  kernels::active().mul(a.size(), a.data(), b.data(), out.data());
  return out;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // √(2/π)
constexpr double kGeluA = 0.044715;
}  // namespace

double gelu(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_derivative(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  Tensor mask(rows, cols, 1.0);
  if (rate == 0.0) return mask;
  const double keep = 1.0 / (1.0 - rate);
  for (auto& m : mask.values()) m = rng.uniform01() < rate ? 0.0 : keep;
  return mask;
}

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(fan_in + fan_out, 1)));
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
}

}  // namespace sumlife::nn
