#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sumlife/kernels.hpp"
#include "sumlife/nn.hpp"

namespace sumlife::nn {

LossGrad cross_entropy(const Tensor& logits, std::span<const std::uint32_t> labels) {
  if (labels.size() != logits.rows()) throw std::invalid_argument("cross_entropy: one label per row required");
  LossGrad out;
  out.grad = Tensor(logits.rows(), logits.cols());
  if (logits.rows() == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (labels[r] >= logits.cols()) throw std::invalid_argument("cross_entropy: label out of range");
    const double* x = logits.row(r);
    const double mx = *std::max_element(x, x + logits.cols());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(x[c] - mx);
    const double lse = mx + std::log(sum);
    total += lse - x[labels[r]];
    double* g = out.grad.row(r);
    for (std::size_t c = 0; c < logits.cols(); ++c) g[c] = std::exp(x[c] - lse) * inv_n;
    g[labels[r]] -= inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

NContrastResult ncontrast_loss(const Tensor& z, const Tensor& gamma, double tau) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  if (gamma.rows() != n || gamma.cols() != n) throw std::invalid_argument("ncontrast_loss: gamma must be B x B");
  if (!(tau > 0.0)) throw std::invalid_argument("ncontrast_loss: tau must be positive");
  NContrastResult out;
  out.grad = Tensor(n, d);

  std::vector<char> keep(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && gamma(i, j) > 0.0) keep[i] = 1;
    }
    out.retained += keep[i];
  }
  if (out.retained == 0 || n < 2) {
    out.retained = 0;
    return out;
  }

  // Unit rows; norms clamped away from zero.
  constexpr double kMinNorm = 1e-8;
  Tensor u(n, d);
  std::vector<double> norm(n);
  std::vector<char> clamped(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += z(i, c) * z(i, c);
    norm[i] = std::sqrt(s);
    if (norm[i] < kMinNorm) {
      norm[i] = kMinNorm;
      clamped[i] = 1;
    }
    for (std::size_t c = 0; c < d; ++c) u(i, c) = z(i, c) / norm[i];
  }
  const Tensor sim = matmul_nt(u, u);

  // dS(i, k): gradient of the mean loss w.r.t. sim(i, k) / tau.
  Tensor ds(n, n);
  const double inv_r = 1.0 / static_cast<double>(out.retained);
  double total = 0.0;
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    double mx = -INFINITY;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) mx = std::max(mx, sim(i, k) / tau);
    }
    double all = 0.0;
    double pos = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      e[k] = std::exp(sim(i, k) / tau - mx);
      all += e[k];
      if (gamma(i, k) > 0.0) pos += gamma(i, k) * e[k];
    }
    total += std::log(all) - std::log(pos);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double p = e[k] / all;
      const double q = gamma(i, k) > 0.0 ? gamma(i, k) * e[k] / pos : 0.0;
      ds(i, k) = (p - q) * inv_r;
    }
  }
  out.loss = total * inv_r;

  // Back through sim(i,k) = u_i · u_k, then through the normalization.
  Tensor dsym(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) dsym(i, k) = (ds(i, k) + ds(k, i)) / tau;
  }
  const Tensor du = matmul(dsym, u);
  for (std::size_t i = 0; i < n; ++i) {
    double proj = 0.0;
    if (!clamped[i]) {
      for (std::size_t c = 0; c < d; ++c) proj += u(i, c) * du(i, c);
    }
    for (std::size_t c = 0; c < d; ++c) out.grad(i, c) = (du(i, c) - proj * u(i, c)) / norm[i];
  }
  return out;
}

double combined_loss(double ce, double nc, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("combined_loss: alpha must be >= 0");
  return ce + alpha * nc;
}

Tensor positive_indicator(const learn::Subgraph& b) {
  Tensor g(b.size(), b.size());
  for (const auto& e : b.edges) {
    if (e.source == e.target) continue;
    g(e.source, e.target) = 1.0;
    g(e.target, e.source) = 1.0;
  }
  return g;
}

CsrMatrix batch_adjacency(const learn::Subgraph& b) {
  const std::size_t n = b.size();
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (std::uint32_t v = 0; v < n; ++v) rows[v].push_back(v);
  for (const auto& e : b.edges) rows[e.source].push_back(e.target);
  CsrMatrix a;
  a.rows = a.cols = n;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    a.col.insert(a.col.end(), r.begin(), r.end());
    a.val.insert(a.val.end(), r.size(), 1.0);
    a.row_ptr.push_back(a.col.size());
  }
  return a;
}

CsrMatrix normalize_adjacency(const CsrMatrix& a) {
  std::vector<double> deg(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (auto i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) deg[r] += a.val[i];
  }
  CsrMatrix out = a;
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (auto i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) {
      const double dd = deg[r] * deg[a.col[i]];
      out.val[i] = dd > 0.0 ? a.val[i] / std::sqrt(dd) : 0.0;
    }
  }
  return out;
}

Tensor gcn_layer(const Tensor& h, const CsrMatrix& a, const Tensor& w, bool normalize) {
  const Tensor hw = matmul(h, w);
  return relu(normalize ? spmm(normalize_adjacency(a), hw) : spmm(a, hw));
}

}  // namespace sumlife::nn
