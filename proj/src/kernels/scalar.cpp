#include <cmath>

#include "sumlife/kernels.hpp"

namespace sumlife::kernels::detail {

namespace {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy(n, aip, b + p * n, c + i * n);
    }
  }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy(n, aip, b + i * n, c + p * n);
    }
  }
}

void relu_forward(std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::size_t n, const double* x, const double* dy, double* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void adam_update(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                 double beta1, double beta2, double bc1, double bc2, double eps) {
  const double c1 = 1.0 - beta1;
  const double c2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double mi = beta1 * m[i] + c1 * g[i];
    const double gg = g[i] * g[i];
    const double vi = beta2 * v[i] + c2 * gg;
    m[i] = mi;
    v[i] = vi;
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    const double step = lr * mhat / (std::sqrt(vhat) + eps);
    p[i] = p[i] - step;
  }
}

}  // namespace

const KernelTable kScalarTable{"scalar", axpy, gemm_nn, gemm_tn, relu_forward, relu_backward, mul, adam_update};

}  // namespace sumlife::kernels::detail
