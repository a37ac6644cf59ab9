#include "sumlife/nn.hpp"

namespace sumlife::nn::detail {

namespace {

struct GraphMlpPass {
  Tensor a;      // X W0
  Tensor mask;
  Tensor x1;     // GELU(a) ∘ mask
  Tensor z;      // x1 W1, the contrastive embedding
  Tensor logits; // z W2
};

GraphMlpPass run(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  GraphMlpPass p;
  p.a = spmm(b.features, net.param("W0"));
  p.mask = dropout_mask(p.a.rows(), p.a.cols(), train ? net.config().dropout : 0.0, rng);
  Tensor g(p.a.rows(), p.a.cols());
  for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = gelu(p.a.data()[i]);
  p.x1 = hadamard(g, p.mask);
  p.z = matmul(p.x1, net.param("W1"));
  p.logits = matmul(p.z, net.param("W2"));
  return p;
}

}  // namespace

Tensor graph_mlp_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  return run(net, b, train, rng).logits;
}

double graph_mlp_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads) {
  const GraphMlpPass p = run(net, b, true, rng);
  const LossGrad ce = cross_entropy(gather_rows(p.logits, b.targets), b.labels);
  const double alpha = net.config().alpha;
  const NContrastResult nc = ncontrast_loss(p.z, positive_indicator(b), net.config().tau);
  const double total = combined_loss(ce.loss, nc.loss, alpha);
  if (grads == nullptr) return total;

  const Tensor dlogits = scatter_rows(ce.grad, b.targets, b.size());
  Tensor dz = matmul_nt(dlogits, net.param("W2"));
  if (alpha != 0.0 && nc.retained > 0) {
    Tensor scaled = nc.grad;
    for (auto& v : scaled.values()) v *= alpha;
    add_into(dz, scaled);
  }
  const Tensor dg = hadamard(matmul_nt(dz, net.param("W1")), p.mask);
  Tensor da(dg.rows(), dg.cols());
  for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] = dg.data()[i] * gelu_derivative(p.a.data()[i]);
  Tensor dw0(net.input_width(), p.a.cols());
  spmm_t_accumulate(b.features, da, dw0);

  grads->clear();
  grads->push_back(std::move(dw0));
  grads->push_back(matmul_tn(p.x1, dz));
  grads->push_back(matmul_tn(p.z, dlogits));
  return total;
}

}  // namespace sumlife::nn::detail
