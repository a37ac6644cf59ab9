#include "sumlife/nn.hpp"

namespace sumlife::nn::detail {

namespace {

struct MlpPass {
  Tensor pre;     // X W0 + b0
  Tensor mask;    // dropout mask (all ones in eval mode)
  Tensor hidden;  // ReLU(pre) ∘ mask
  Tensor logits;  // hidden W_out + b_out
};

MlpPass run(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  MlpPass p;
  p.pre = spmm(b.features, net.param("W0"));
  add_row_vector(p.pre, net.param("b0"));
  p.mask = dropout_mask(p.pre.rows(), p.pre.cols(), train ? net.config().dropout : 0.0, rng);
  p.hidden = hadamard(relu(p.pre), p.mask);
  p.logits = matmul(p.hidden, net.param("W_out"));
  add_row_vector(p.logits, net.param("b_out"));
  return p;
}

}  // namespace

Tensor mlp_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng) {
  return run(net, b, train, rng).logits;
}

double mlp_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads) {
  const MlpPass p = run(net, b, true, rng);
  const LossGrad ce = cross_entropy(gather_rows(p.logits, b.targets), b.labels);
  if (grads == nullptr) return ce.loss;

  const Tensor dlogits = scatter_rows(ce.grad, b.targets, b.size());
  Tensor dw0(net.input_width(), p.pre.cols());
  const Tensor dhidden = hadamard(matmul_nt(dlogits, net.param("W_out")), p.mask);
  const Tensor dpre = relu_backward(p.pre, dhidden);
  spmm_t_accumulate(b.features, dpre, dw0);

  grads->clear();
  grads->push_back(std::move(dw0));
  grads->push_back(column_sums(dpre));
  grads->push_back(matmul_tn(p.hidden, dlogits));
  grads->push_back(column_sums(dlogits));
  return ce.loss;
}

}  // namespace sumlife::nn::detail
