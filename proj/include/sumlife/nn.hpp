#pragma once

// Classifiers (MLP, Graph-MLP, sampled GCN with jumping knowledge), their
// losses with hand-derived gradients, and Adam.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumlife/features.hpp"
#include "sumlife/rng.hpp"
#include "sumlife/summarizer.hpp"
#include "sumlife/tensor.hpp"

namespace sumlife::nn {

// ---- losses ---------------------------------------------------------------

struct LossGrad {
  double loss = 0.0;
  Tensor grad;  // d loss / d input, same shape as the input
};

/// Mean softmax cross-entropy over rows; labels[r] < logits.cols().
LossGrad cross_entropy(const Tensor& logits, std::span<const std::uint32_t> labels);

struct NContrastResult {
  double loss = 0.0;
  Tensor grad;              // d loss / d z
  std::size_t retained = 0; // rows that had at least one positive
};

/// Neighbor-contrastive loss with cosine similarity and temperature tau.
/// gamma is B×B with gamma(i, j) > 0 marking positives; the diagonal is
/// ignored. Rows without positives are left out of the mean.
NContrastResult ncontrast_loss(const Tensor& z, const Tensor& gamma, double tau);

/// loss_CE + alpha · loss_NC
double combined_loss(double ce, double nc, double alpha);

/// Symmetric 1-hop indicator over the batch's edges (self-pairs excluded).
Tensor positive_indicator(const learn::Subgraph& b);

// ---- GCN building blocks --------------------------------------------------

/// Batch adjacency: out-edges between batch vertices (parallel edges
/// collapsed) plus a self-loop on every vertex, all weights 1.
CsrMatrix batch_adjacency(const learn::Subgraph& b);

/// Scales entry (v, u) by 1/√(d̂_v d̂_u), d̂ being the row sums.
CsrMatrix normalize_adjacency(const CsrMatrix& a);

/// ReLU(A · h · W), with A normalized first when normalize is set.
Tensor gcn_layer(const Tensor& h, const CsrMatrix& a, const Tensor& w, bool normalize);

// ---- networks -------------------------------------------------------------

enum class Architecture { kMlp, kGraphMlp, kGcn, kGcnEdges };

Architecture parse_architecture(std::string_view s);  // throws ConfigError
std::string_view to_string(Architecture a);

struct ModelConfig {
  Architecture arch = Architecture::kMlp;
  std::vector<std::size_t> hidden{1024};  // one entry per hidden layer
  double dropout = 0.5;
  double lr = 0.01;
  double alpha = 1.0;       // Graph-MLP only
  double tau = 2.0;         // Graph-MLP only
  bool normalize = false;   // GCN only
  bool zero_init_growth = false;

  /// Tuned defaults for each architecture.
  static ModelConfig defaults(Architecture a);

  int train_hops(summary::SummaryModel m) const;
  int eval_hops(summary::SummaryModel m) const;
  bool edge_as_vertex() const { return arch == Architecture::kGcnEdges; }
  void validate() const;  // throws ConfigError
};

struct Parameter {
  std::string name;
  Tensor value;
};

class Network {
 public:
  Network(ModelConfig cfg, std::size_t input_width, std::size_t classes, std::uint64_t init_seed);
  /// Assembles a network from stored tensors (checkpoint loading).
  Network(ModelConfig cfg, std::size_t input_width, std::size_t classes, std::vector<Parameter> params);

  const ModelConfig& config() const { return cfg_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t class_count() const { return classes_; }

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  const Tensor& param(std::string_view name) const;
  Tensor& param(std::string_view name);

  /// Logits for the batch's target draws, in draw order. Dropout is applied
  /// only when train is set, using rng.
  Tensor forward(const learn::Subgraph& b, bool train, Rng& rng) const;

  /// Training-mode loss of the batch (CE, plus α·NContrast for Graph-MLP).
  /// When grads is given it receives one gradient per parameter.
  double loss(const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads) const;

  /// Argmax of the eval-mode logits; ties go to the lowest class index.
  std::vector<std::uint32_t> predict(const learn::Subgraph& b) const;

  /// Widens the input and output layers. Existing weights are kept bit for
  /// bit; new entries are Glorot-uniform (or zero) and new biases zero.
  void grow(std::size_t new_input_width, std::size_t new_classes, Rng& rng);

 private:
  void check_batch(const learn::Subgraph& b) const;

  ModelConfig cfg_;
  std::size_t input_width_;
  std::size_t classes_;
  std::vector<Parameter> params_;
};

/// Row-wise argmax with lowest-index tie breaking.
std::vector<std::uint32_t> argmax_rows(const Tensor& logits);

// Per-architecture forward/backward passes over all batch vertices. `all`
// receives logits for every batch vertex; grads (if given) are aligned with
// net.params().
namespace detail {
Tensor gather_rows(const Tensor& all, std::span<const std::uint32_t> rows);
Tensor scatter_rows(const Tensor& rows_grad, std::span<const std::uint32_t> rows, std::size_t n);

Tensor mlp_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng);
double mlp_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads);
Tensor graph_mlp_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng);
double graph_mlp_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads);
Tensor gcn_logits(const Network& net, const learn::Subgraph& b, bool train, Rng& rng);
double gcn_loss(const Network& net, const learn::Subgraph& b, Rng& rng, std::vector<Tensor>* grads);
}  // namespace detail

// ---- optimizer ------------------------------------------------------------

class Adam {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  Adam() = default;
  explicit Adam(const std::vector<Parameter>& params);

  /// One bias-corrected update. grads must align with params.
  void step(std::vector<Parameter>& params, const std::vector<Tensor>& grads, double lr);
  std::uint64_t steps() const { return t_; }

 private:
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::uint64_t t_ = 0;
};

}  // namespace sumlife::nn
