#include <arm_neon.h>

#include <cmath>

#include "sumlife/kernels.hpp"

namespace sumlife::kernels::detail {

namespace {

void axpy(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), t));
  }
  for (; i < n; ++i) {
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
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const uint64x2_t mask = vcgtq_f64(vx, zero);
    vst1q_f64(y + i, vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vx))));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::size_t n, const double* x, const double* dy, double* dx) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t mask = vcgtq_f64(vld1q_f64(x + i), zero);
    vst1q_f64(dx + i, vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vld1q_f64(dy + i)))));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void adam_update(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                 double beta1, double beta2, double bc1, double bc2, double eps) {
  const double c1 = 1.0 - beta1;
  const double c2 = 1.0 - beta2;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t mi =
        vaddq_f64(vmulq_n_f64(vld1q_f64(m + i), beta1), vmulq_n_f64(gi, c1));
    const float64x2_t gg = vmulq_f64(gi, gi);
    const float64x2_t vi = vaddq_f64(vmulq_n_f64(vld1q_f64(v + i), beta2), vmulq_n_f64(gg, c2));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vdivq_f64(mi, vdupq_n_f64(bc1));
    const float64x2_t vhat = vdivq_f64(vi, vdupq_n_f64(bc2));
    const float64x2_t step =
        vdivq_f64(vmulq_n_f64(mhat, lr), vaddq_f64(vsqrtq_f64(vhat), vdupq_n_f64(eps)));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
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

const KernelTable kNeonTable{"neon", axpy, gemm_nn, gemm_tn, relu_forward, relu_backward, mul, adam_update};

}  // namespace sumlife::kernels::detail
