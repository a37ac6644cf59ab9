#include <algorithm>
#include <cmath>
#include <utility>
#include <stdexcept>

#include "sumlife/common.hpp"
#include "sumlife/nn.hpp"

namespace sumlife::nn {

Architecture parse_architecture(std::string_view s) {
  if (s == "mlp") return Architecture::kMlp;
  if (s == "graph-mlp") return Architecture::kGraphMlp;
  if (s == "gcn") return Architecture::kGcn;
  if (s == "gcn-edges") return Architecture::kGcnEdges;
  throw ConfigError("unknown architecture '" + std::string(s) + "' (expected mlp, graph-mlp, gcn or gcn-edges)");
}

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::kMlp: return "mlp";
    case Architecture::kGraphMlp: return "graph-mlp";
    case Architecture::kGcn: return "gcn";
    case Architecture::kGcnEdges: return "gcn-edges";
  }
  return "?";
}

ModelConfig ModelConfig::defaults(Architecture a) {
  ModelConfig c;
  c.arch = a;
  switch (a) {
    case Architecture::kMlp:
      c.hidden = {1024};
      c.dropout = 0.5;
      c.lr = 0.01;
      break;
    case Architecture::kGraphMlp:
      c.hidden = {64};
      c.dropout = 0.2;
      c.lr = 0.01;
      c.alpha = 1.0;
      c.tau = 2.0;
      break;
    case Architecture::kGcn:
      c.hidden = {64};
      c.dropout = 0.0;
      c.lr = 0.1;
      break;
    case Architecture::kGcnEdges:
      c.hidden = {32, 32};
      c.dropout = 0.0;
      c.lr = 0.1;
      break;
  }
  return c;
}

int ModelConfig::train_hops(summary::SummaryModel m) const {
  switch (arch) {
    case Architecture::kMlp: return 0;
    case Architecture::kGraphMlp: return 1;
    case Architecture::kGcn: return summary::hops(m);
    case Architecture::kGcnEdges: return 2;
  }
  return 0;
}

int ModelConfig::eval_hops(summary::SummaryModel m) const {
  return arch == Architecture::kGraphMlp ? 0 : train_hops(m);
}

void ModelConfig::validate() const {
  if (hidden.empty()) throw ConfigError("at least one hidden layer is required");
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("hidden layer sizes must be positive");
  }
  if ((arch == Architecture::kMlp || arch == Architecture::kGraphMlp) && hidden.size() != 1) {
    throw ConfigError(std::string(to_string(arch)) + " takes exactly one hidden size");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
}

namespace {

struct Shape {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  bool bias;
};

std::vector<Shape> layout(const ModelConfig& cfg, std::size_t in, std::size_t classes) {
  std::vector<Shape> s;
  switch (cfg.arch) {
    case Architecture::kMlp:
      s = {{"W0", in, cfg.hidden[0], false},
           {"b0", 1, cfg.hidden[0], true},
           {"W_out", cfg.hidden[0], classes, false},
           {"b_out", 1, classes, true}};
      break;
    case Architecture::kGraphMlp:
      s = {{"W0", in, cfg.hidden[0], false},
           {"W1", cfg.hidden[0], cfg.hidden[0], false},
           {"W2", cfg.hidden[0], classes, false}};
      break;
    case Architecture::kGcn:
    case Architecture::kGcnEdges: {
      std::size_t prev = in;
      std::size_t jk = 0;
      for (std::size_t k = 0; k < cfg.hidden.size(); ++k) {
        s.push_back({"W" + std::to_string(k), prev, cfg.hidden[k], false});
        prev = cfg.hidden[k];
        jk += cfg.hidden[k];
      }
      s.push_back({"W_out", jk, classes, false});
      s.push_back({"b_out", 1, classes, true});
      break;
    }
  }
  return s;
}

// Parameter holding the input rows, and those holding the class columns.
bool grows_rows(const ModelConfig&, const std::string& name) { return name == "W0"; }
bool grows_cols(const ModelConfig& cfg, const std::string& name) {
  if (cfg.arch == Architecture::kGraphMlp) return name == "W2";
  return name == "W_out" || name == "b_out";
}

}  // namespace

Network::Network(ModelConfig cfg, std::size_t input_width, std::size_t classes, std::uint64_t init_seed)
    : cfg_(std::move(cfg)), input_width_(input_width), classes_(classes) {
  cfg_.validate();
  Rng rng(init_seed);
  for (const auto& s : layout(cfg_, input_width, classes)) {
    Tensor t(s.rows, s.cols);
    if (!s.bias) glorot_uniform(t, s.rows, s.cols, rng);
    params_.push_back({s.name, std::move(t)});
  }
}

Network::Network(ModelConfig cfg, std::size_t input_width, std::size_t classes, std::vector<Parameter> params)
    : cfg_(std::move(cfg)), input_width_(input_width), classes_(classes), params_(std::move(params)) {
  cfg_.validate();
  const auto expected = layout(cfg_, input_width, classes);
  if (expected.size() != params_.size()) throw std::invalid_argument("parameter count does not match the architecture");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& p = params_[i];
    if (p.name != expected[i].name || p.value.rows() != expected[i].rows || p.value.cols() != expected[i].cols) {
      throw std::invalid_argument("parameter " + p.name + " does not match the architecture");
    }
  }
}

const Tensor& Network::param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.value;
  }
  throw std::out_of_range("no parameter named " + std::string(name));
}

Tensor& Network::param(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).param(name));
}

void Network::check_batch(const learn::Subgraph& b) const {
  if (b.edge_as_vertex != cfg_.edge_as_vertex()) {
    throw std::invalid_argument(cfg_.edge_as_vertex() ? "gcn-edges needs an edge-as-vertex batch"
                                                      : "edge-as-vertex batches need the gcn-edges architecture");
  }
  if (b.features.rows() != b.size()) throw std::invalid_argument("batch feature rows do not match its vertices");
}

Tensor Network::forward(const learn::Subgraph& b, bool train, Rng& rng) const {
  check_batch(b);
  Tensor all;
  switch (cfg_.arch) {
    case Architecture::kMlp: all = detail::mlp_logits(*this, b, train, rng); break;
    case Architecture::kGraphMlp: all = detail::graph_mlp_logits(*this, b, train, rng); break;
    case Architecture::kGcn:
    case Architecture::kGcnEdges: all = detail::gcn_logits(*this, b, train, rng); break;
  }
  return detail::gather_rows(all, b.targets);
}

double Network::loss(const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads) const {
  check_batch(b);
  double l = 0.0;
  switch (cfg_.arch) {
    case Architecture::kMlp: l = detail::mlp_loss(*this, b, rng, grads); break;
    case Architecture::kGraphMlp: l = detail::graph_mlp_loss(*this, b, rng, grads); break;
    case Architecture::kGcn:
    case Architecture::kGcnEdges: l = detail::gcn_loss(*this, b, rng, grads); break;
  }
  if (!std::isfinite(l)) throw NumericalError("loss is not finite");
  if (grads != nullptr) {
    for (std::size_t i = 0; i < grads->size(); ++i) check_finite((*grads)[i], "gradient of " + params_[i].name);
  }
  return l;
}

std::vector<std::uint32_t> argmax_rows(const Tensor& logits) {
  std::vector<std::uint32_t> out(logits.rows(), 0);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const double* x = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c) {
      if (x[c] > x[best]) best = c;
    }
    out[r] = static_cast<std::uint32_t>(best);
  }
  return out;
}

std::vector<std::uint32_t> Network::predict(const learn::Subgraph& b) const {
  Rng unused(0);
  return argmax_rows(forward(b, false, unused));
}

void Network::grow(std::size_t new_input_width, std::size_t new_classes, Rng& rng) {
  if (new_input_width < input_width_ || new_classes < classes_) {
    throw std::invalid_argument("grow cannot shrink a network");
  }
  for (auto& p : params_) {
    const Tensor& old = p.value;
    const std::size_t rows = grows_rows(cfg_, p.name) ? new_input_width : old.rows();
    const std::size_t cols = grows_cols(cfg_, p.name) ? new_classes : old.cols();
    if (rows == old.rows() && cols == old.cols()) continue;
    const bool bias = p.name.front() == 'b';
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Tensor t(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (r < old.rows() && c < old.cols()) {
          t(r, c) = old(r, c);
        } else if (!bias && !cfg_.zero_init_growth) {
          t(r, c) = rng.uniform(-limit, limit);
        }
      }
    }
    p.value = std::move(t);
  }
  input_width_ = new_input_width;
  classes_ = new_classes;
}

namespace detail {

Tensor gather_rows(const Tensor& all, std::span<const std::uint32_t> rows) {
  Tensor out(rows.size(), all.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(all.row(rows[i]), all.cols(), out.row(i));
  return out;
}

Tensor scatter_rows(const Tensor& rows_grad, std::span<const std::uint32_t> rows, std::size_t n) {
  Tensor out(n, rows_grad.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double* dst = out.row(rows[i]);
    const double* src = rows_grad.row(i);
    for (std::size_t c = 0; c < rows_grad.cols(); ++c) dst[c] += src[c];
  }
  return out;
}

}  // namespace detail

}  // namespace sumlife::nn
