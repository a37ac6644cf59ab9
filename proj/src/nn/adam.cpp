#include <cmath>
#include <stdexcept>

#include "sumlife/kernels.hpp"
#include "sumlife/nn.hpp"

namespace sumlife::nn {

Adam::Adam(const std::vector<Parameter>& params) {
  for (const auto& p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void Adam::step(std::vector<Parameter>& params, const std::vector<Tensor>& grads, double lr) {
  if (params.size() != grads.size() || params.size() != m_.size()) {
    throw std::invalid_argument("Adam: parameter, gradient and state counts differ");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  const auto update = kernels::active().adam_update;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i].value;
    const Tensor& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols() || m_[i].rows() != p.rows() || m_[i].cols() != p.cols()) {
      throw std::invalid_argument("Adam: shape mismatch for " + params[i].name);
    }
    update(p.size(), p.data(), g.data(), m_[i].data(), v_[i].data(), lr, kBeta1, kBeta2, bc1, bc2, kEps);
  }
}

}  // namespace sumlife::nn
