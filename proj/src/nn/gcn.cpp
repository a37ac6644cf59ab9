#include <string>

#include "sumlife/nn.hpp"

namespace sumlife::nn::detail {

namespace {

struct Layer {
  Tensor hw;    // h_{k-1} W_k (before propagation)
  Tensor pre;   // A · hw
  Tensor mask;
  Tensor out;   // ReLU(pre) ∘ mask
};

struct GcnPass {
  CsrMatrix adj;
  std::vector<Layer> layers;
  Tensor jk;      // concatenated layer outputs
  Tensor logits;
};

GcnPass run(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  const auto& cfg = net.config();
  GcnPass p;
  p.adj = batch_adjacency(b);
  if (cfg.normalize) p.adj = normalize_adjacency(p.adj);
  const std::size_t n = b.size();
  std::size_t jk_width = 0;
  for (std::size_t k = 0; k < cfg.hidden.size(); ++k) {
    Layer l;
    const Tensor& w = net.param("W" + std::to_string(k));
    l.hw = k == 0 ? spmm(b.features, w) : matmul(p.layers.back().out, w);
    l.pre = spmm(p.adj, l.hw);
    l.mask = dropout_mask(n, w.cols(), train ? cfg.dropout : 0.0, rng);
    l.out = hadamard(relu(l.pre), l.mask);
    jk_width += w.cols();
    p.layers.push_back(std::move(l));
  }
  p.jk = Tensor(n, jk_width);
  std::size_t off = 0;
  for (const auto& l : p.layers) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < l.out.cols(); ++c) p.jk(r, off + c) = l.out(r, c);
    }
    off += l.out.cols();
  }
  p.logits = matmul(p.jk, net.param("W_out"));
  add_row_vector(p.logits, net.param("b_out"));
  return p;
}

}  // namespace

Tensor gcn_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  return run(net, b, train, rng).logits;
}

double gcn_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads) {
  const GcnPass p = run(net, b, true, rng);
  const LossGrad ce = cross_entropy(gather_rows(p.logits, b.targets), b.labels);
  if (grads == nullptr) return ce.loss;

  const std::size_t n = b.size();
  const std::size_t depth = p.layers.size();
  const Tensor dlogits = scatter_rows(ce.grad, b.targets, n);
  const Tensor djk = matmul_nt(dlogits, net.param("W_out"));

  // Split the jumping-knowledge gradient back onto the layer outputs.
  std::vector<Tensor> dout(depth);
  std::size_t off = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t w = p.layers[k].out.cols();
    dout[k] = Tensor(n, w);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < w; ++c) dout[k](r, c) = djk(r, off + c);
    }
    off += w;
  }

  std::vector<Tensor> dw(depth);
  for (std::size_t k = depth; k-- > 0;) {
    const Layer& l = p.layers[k];
    const Tensor dpre = relu_backward(l.pre, hadamard(dout[k], l.mask));
    const Tensor dhw = spmm_t(p.adj, dpre);
    if (k == 0) {
      dw[0] = Tensor(net.input_width(), l.hw.cols());
      spmm_t_accumulate(b.features, dhw, dw[0]);
    } else {
      dw[k] = matmul_tn(p.layers[k - 1].out, dhw);
      add_into(dout[k - 1], matmul_nt(dhw, net.param("W" + std::to_string(k))));
    }
  }

  grads->clear();
  for (auto& g : dw) grads->push_back(std::move(g));
  grads->push_back(matmul_tn(p.jk, dlogits));
  grads->push_back(column_sums(dlogits));
  return ce.loss;
}

}  // namespace sumlife::nn::detail
