#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/nn_support.hpp"
#include "sumlife/checkpoint.hpp"
#include "sumlife/nn.hpp"

namespace fs = std::filesystem;
using namespace sumlife;
using namespace sumlife::nn;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(r, c);
  for (double& x : t.values()) x = rng.uniform(-1, 1);
  return t;
}

ModelConfig small(Architecture a) {
  ModelConfig cfg = ModelConfig::defaults(a);
  switch (a) {
    case Architecture::kMlp: cfg.hidden = {7}; break;
    case Architecture::kGraphMlp: cfg.hidden = {6}; break;
    case Architecture::kGcn: cfg.hidden = {5}; break;
    case Architecture::kGcnEdges: cfg.hidden = {4, 3}; break;
  }
  return cfg;
}

CsrMatrix csr(std::size_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& entries) {
  CsrMatrix m;
  m.rows = m.cols = n;
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& [i, j, v] : entries) {
      if (i == r) {
        m.col.push_back(j);
        m.val.push_back(v);
      }
    }
    m.row_ptr.push_back(m.col.size());
  }
  return m;
}

}  // namespace

TEST(Tensor, DenseProductsMatchNaive) {
  const Tensor a = random_tensor(4, 3, 1), b = random_tensor(3, 5, 2), c = random_tensor(4, 5, 3);
  const Tensor ab = matmul(a, b);
  const Tensor atc = matmul_tn(a, c);
  const Tensor abt = matmul_nt(c, b);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      EXPECT_NEAR(ab(i, j), s, 1e-14);
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < 4; ++i) s += a(i, k) * c(i, j);
      EXPECT_NEAR(atc(k, j), s, 1e-14);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0;
      for (std::size_t j = 0; j < 5; ++j) s += c(i, j) * b(k, j);
      EXPECT_NEAR(abt(i, k), s, 1e-14);
    }
  }
}

TEST(Tensor, CheckFiniteThrows) {
  Tensor t(2, 2);
  EXPECT_NO_THROW(check_finite(t, "t"));
  t(1, 1) = std::nan("");
  EXPECT_THROW(check_finite(t, "t"), NumericalError);
}

TEST(Tensor, DropoutMask) {
  Rng a(4), b(4);
  EXPECT_TRUE(bit_equal(dropout_mask(5, 6, 0.5, a), dropout_mask(5, 6, 0.5, b)));
  Rng c(4);
  const Tensor m = dropout_mask(100, 100, 0.5, c);
  for (double x : m.values()) EXPECT_TRUE(x == 0.0 || x == 2.0);
  Rng d(4);
  const Tensor ones = dropout_mask(3, 3, 0.0, d);
  for (double x : ones.values()) EXPECT_EQ(x, 1.0);
}

TEST(CrossEntropy, UniformLogitsGiveLogC) {
  const Tensor logits(3, 5, 0.25);
  const std::vector<std::uint32_t> labels{0, 2, 4};
  const auto r = cross_entropy(logits, labels);
  EXPECT_NEAR(r.loss, std::log(5.0), 1e-15);
  EXPECT_NEAR(r.grad(0, 0), (0.2 - 1.0) / 3.0, 1e-15);
  EXPECT_NEAR(r.grad(0, 1), 0.2 / 3.0, 1e-15);
}

TEST(NContrast, EqualSimilaritiesGiveLogRatio) {
  const Tensor z(4, 3, 1.0);
  Tensor gamma(4, 4);
  gamma(0, 1) = gamma(0, 2) = 1;
  const auto r = ncontrast_loss(z, gamma, 2.0);
  EXPECT_EQ(r.retained, 1u);
  EXPECT_NEAR(r.loss, -std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(r.loss, 0.4055, 1e-4);
}

TEST(NContrast, NoPositivesIsZero) {
  const auto r = ncontrast_loss(random_tensor(5, 3, 1), Tensor(5, 5), 2.0);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.retained, 0u);
  for (double g : r.grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(NContrast, GradientMatchesFiniteDifferences) {
  Tensor z = random_tensor(6, 4, 7);
  Rng rng(7);
  Tensor gamma(6, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (rng.below(2) == 0) gamma(i, j) = gamma(j, i) = 1;
    }
  }
  gamma(0, 5) = gamma(5, 0) = 1;
  const auto r = ncontrast_loss(z, gamma, 2.0);
  double worst = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double saved = z.values()[i];
    z.values()[i] = saved + 1e-5;
    const double up = ncontrast_loss(z, gamma, 2.0).loss;
    z.values()[i] = saved - 1e-5;
    const double down = ncontrast_loss(z, gamma, 2.0).loss;
    z.values()[i] = saved;
    const double num = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(num - r.grad.values()[i]) / std::max({std::abs(num), std::abs(r.grad.values()[i]), 1e-6}));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(CombinedLoss, Arithmetic) {
  EXPECT_DOUBLE_EQ(combined_loss(0.3, 0.2, 1.0), 0.5);
  EXPECT_EQ(combined_loss(0.3, 0.2, 0.0), 0.3);
  EXPECT_THROW(combined_loss(0.3, 0.2, -1.0), std::invalid_argument);
}

TEST(GcnLayer, ZeroInputAndIdentity) {
  const CsrMatrix self = csr(1, {{0, 0, 1.0}});
  Tensor w(2, 2);
  w(0, 0) = w(1, 1) = 1;
  Tensor h(1, 2);
  h(0, 0) = -1.5;
  h(0, 1) = 2.5;
  const Tensor out = gcn_layer(h, self, w, false);
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_EQ(out(0, 1), 2.5);
  const Tensor z = gcn_layer(Tensor(1, 2), self, random_tensor(2, 3, 1), false);
  for (double x : z.values()) EXPECT_EQ(x, 0.0);
}

TEST(GcnLayer, TwoVertexNormalizedByHand) {
  // Edge 0 -> 1 plus self-loops; row sums d = (2, 1).
  const CsrMatrix a = csr(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
  Tensor w(2, 2);
  w(0, 0) = w(1, 1) = 1;
  Tensor h(2, 2);
  h(0, 0) = 1;
  h(0, 1) = 2;
  h(1, 0) = 3;
  h(1, 1) = -4;
  const Tensor out = gcn_layer(h, a, w, true);
  EXPECT_NEAR(out(0, 0), 1.0 / 2.0 + 3.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(out(0, 1), 0.0);  // 2/2 - 4/√2 < 0
  EXPECT_NEAR(out(1, 0), 3.0, 1e-15);
  EXPECT_EQ(out(1, 1), 0.0);
  const Tensor raw = gcn_layer(h, a, w, false);
  EXPECT_EQ(raw(0, 0), 4.0);
  EXPECT_EQ(raw(0, 1), 0.0);
}

TEST(BatchAdjacency, SelfLoopsAndDedup) {
  learn::Subgraph b = support::random_batch(1, 3, 4, 2, 1, 0);
  b.edges = {{0, 1, 1}, {0, 2, 1}, {1, 0, 2}};
  const CsrMatrix a = batch_adjacency(b);
  EXPECT_EQ(a.col.size(), 5u);  // 3 self-loops + (0,1) + (1,2)
  const Tensor gamma = positive_indicator(b);
  EXPECT_EQ(gamma(0, 1), 1.0);
  EXPECT_EQ(gamma(1, 0), 1.0);
  EXPECT_EQ(gamma(2, 1), 1.0);
  EXPECT_EQ(gamma(0, 0), 0.0);
  EXPECT_EQ(gamma(0, 2), 0.0);
}

struct GradCase {
  Architecture arch;
  bool normalize;
  const char* name;
};

void PrintTo(const GradCase& c, std::ostream* os) { *os << c.name; }

class GradientCheck : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifferences) {
  const GradCase gc = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelConfig cfg = small(gc.arch);
    cfg.normalize = gc.normalize;
    Network net(cfg, 6, 4, seed);
    support::randomize(net, seed + 100);
    auto b = support::random_batch(seed, 7, 6, 4, 5, 10, gc.arch == Architecture::kGcnEdges ? 2 : 1);
    if (gc.arch == Architecture::kGcnEdges) b = learn::edge_as_vertex_transform(b);
    const auto r = support::check_gradients(net, b, seed + 1000);
    EXPECT_LT(r.max_rel_error, 1e-4) << gc.name << " seed " << seed;
    EXPECT_GT(r.checked, 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Architectures, GradientCheck,
                         ::testing::Values(GradCase{Architecture::kMlp, false, "mlp"},
                                           GradCase{Architecture::kGraphMlp, false, "graph_mlp"},
                                           GradCase{Architecture::kGcn, false, "gcn"},
                                           GradCase{Architecture::kGcn, true, "gcn_normalized"},
                                           GradCase{Architecture::kGcnEdges, false, "gcn_edges"},
                                           GradCase{Architecture::kGcnEdges, true, "gcn_edges_normalized"}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(Mlp, ZeroWeightsGiveClosedFormOutputGradient) {
  ModelConfig cfg = small(Architecture::kMlp);
  cfg.dropout = 0;
  Network net(cfg, 6, 3, 1);
  for (auto& p : net.params()) p.value.fill(0.0);
  Rng rng(2);
  for (double& x : net.param("b0").values()) x = rng.uniform(-1, 1);
  const auto b = support::random_batch(4, 5, 6, 3, 4, 0);
  std::vector<Tensor> grads;
  Rng r(0);
  net.loss(b, r, &grads);
  const Tensor& h_bias = net.param("b0");
  // h = ReLU(b0) for every row, softmax is uniform.
  std::size_t w_out = 0;
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    if (net.params()[i].name == "W_out") w_out = i;
  }
  for (std::size_t j = 0; j < h_bias.cols(); ++j) {
    const double h = std::max(0.0, h_bias(0, j));
    for (std::size_t c = 0; c < 3; ++c) {
      double expected = 0;
      for (auto label : b.labels) expected += h * (1.0 / 3.0 - (label == c ? 1.0 : 0.0));
      expected /= static_cast<double>(b.labels.size());
      EXPECT_NEAR(grads[w_out](j, c), expected, 1e-15);
    }
  }
}

TEST(Mlp, GradientIsLinearInTargets) {
  ModelConfig cfg = small(Architecture::kMlp);
  cfg.dropout = 0;
  Network net(cfg, 6, 3, 5);
  auto b = support::random_batch(2, 4, 6, 3, 2, 0);
  auto one = b, two = b;
  one.targets = {0};
  one.labels = {b.labels[0]};
  two.targets = {0, 0};
  two.labels = {b.labels[0], b.labels[0]};
  std::vector<Tensor> g1, g2;
  Rng r1(0), r2(0);
  EXPECT_DOUBLE_EQ(net.loss(one, r1, &g1), net.loss(two, r2, &g2));
  for (std::size_t i = 0; i < g1.size(); ++i) {
    for (std::size_t k = 0; k < g1[i].size(); ++k) EXPECT_NEAR(g1[i].values()[k], g2[i].values()[k], 1e-15);
  }
}

TEST(Mlp, ZeroInputZeroBiasGivesZeroLogits) {
  Network net(small(Architecture::kMlp), 6, 3, 9);
  learn::Subgraph b = support::random_batch(1, 3, 6, 3, 3, 0);
  b.features.cols.clear();
  b.features.row_ptr.assign(4, 0);
  Rng rng(0);
  const Tensor logits = net.forward(b, false, rng);
  for (double x : logits.values()) EXPECT_EQ(x, 0.0);
}

TEST(Mlp, DropoutZeroTrainEqualsEval) {
  ModelConfig cfg = small(Architecture::kMlp);
  cfg.dropout = 0;
  Network net(cfg, 6, 3, 9);
  const auto b = support::random_batch(1, 5, 6, 3, 5, 0);
  Rng r1(1), r2(2);
  EXPECT_TRUE(bit_equal(net.forward(b, true, r1), net.forward(b, false, r2)));
}

TEST(Predict, TiesAndOrder) {
  Tensor logits(3, 4, 0.5);
  logits(1, 2) = 1.0;
  logits(2, 3) = 2.0;
  logits(2, 1) = 2.0;
  EXPECT_EQ(argmax_rows(logits), (std::vector<std::uint32_t>{0, 2, 1}));
  Network net(small(Architecture::kGcn), 6, 4, 1);
  const auto b = support::random_batch(3, 6, 6, 4, 9, 8);
  EXPECT_EQ(net.predict(b).size(), 9u);
}

TEST(Adam, ZeroGradientAndFirstStep) {
  std::vector<Parameter> p{{"w", Tensor(2, 2, 0.7)}};
  Adam adam(p);
  adam.step(p, {Tensor(2, 2, 0.0)}, 0.1);
  for (double x : p[0].value.values()) EXPECT_EQ(x, 0.7);
  std::vector<Parameter> q{{"w", Tensor(1, 1, 0.0)}};
  Adam fresh(q);
  fresh.step(q, {Tensor(1, 1, 1.0)}, 0.1);
  EXPECT_NEAR(q[0].value(0, 0), -0.1 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(fresh.steps(), 1u);
}

TEST(Grow, PreservesExistingWeights) {
  Network net(small(Architecture::kMlp), 6, 5, 3);
  const Network before = net;
  Rng rng(1);
  net.grow(6, 5, rng);
  for (std::size_t i = 0; i < net.params().size(); ++i) EXPECT_TRUE(bit_equal(net.params()[i].value, before.params()[i].value));
  net.grow(6, 8, rng);
  const Tensor& w = net.param("W_out");
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(w(r, c), before.param("W_out")(r, c));
  }
  EXPECT_THROW(net.grow(5, 8, rng), std::invalid_argument);
}

TEST(Grow, OldClassLogitsUnchanged) {
  Network net(small(Architecture::kMlp), 6, 5, 3);
  const auto b = support::random_batch(2, 6, 6, 5, 6, 0);
  Rng r1(0);
  const Tensor before = net.forward(b, false, r1);
  Rng rng(9);
  net.grow(6, 9, rng);
  Rng r2(0);
  const Tensor after = net.forward(b, false, r2);
  for (std::size_t i = 0; i < before.rows(); ++i) {
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(before(i, c), after(i, c));
  }
}

TEST(Grow, EveryArchitectureWidens) {
  for (auto a : {Architecture::kMlp, Architecture::kGraphMlp, Architecture::kGcn, Architecture::kGcnEdges}) {
    for (bool zero : {false, true}) {
      ModelConfig cfg = small(a);
      cfg.zero_init_growth = zero;
      Network net(cfg, 4, 3, 1);
      Rng rng(2);
      net.grow(7, 6, rng);
      EXPECT_EQ(net.input_width(), 7u);
      EXPECT_EQ(net.class_count(), 6u);
      const auto b = support::random_batch(1, 5, 7, 6, 3, 4, a == Architecture::kGcnEdges ? 2 : 1);
      const auto batch = a == Architecture::kGcnEdges ? learn::edge_as_vertex_transform(b) : b;
      Rng r(0);
      EXPECT_NO_THROW(net.loss(batch, r, nullptr));
    }
  }
}

TEST(Gcn, PermutationEquivariant) {
  Network net(small(Architecture::kGcn), 6, 4, 2);
  const auto b = support::random_batch(8, 6, 6, 4, 6, 9);
  // Reverse the local order and remap everything accordingly.
  learn::Subgraph p = b;
  const std::size_t n = b.size();
  auto flip = [n](std::uint32_t i) { return static_cast<std::uint32_t>(n - 1 - i); };
  p.features.cols.clear();
  p.features.row_ptr = {0};
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = b.features.row(n - 1 - r);
    p.features.cols.insert(p.features.cols.end(), row.begin(), row.end());
    p.features.row_ptr.push_back(p.features.cols.size());
  }
  for (auto& t : p.targets) t = flip(t);
  for (auto& e : p.edges) e = {flip(e.source), e.predicate, flip(e.target)};
  Rng r1(0), r2(0);
  const Tensor x = net.forward(b, false, r1), y = net.forward(p, false, r2);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x.values()[i], y.values()[i], 1e-12);
}

TEST(Training, LossDecreasesOnSeparableToy) {
  ModelConfig cfg = ModelConfig::defaults(Architecture::kMlp);
  cfg.hidden = {16};
  cfg.dropout = 0;
  Network net(cfg, 4, 2, 3);
  learn::Subgraph b;
  b.features.width = 4;
  for (std::uint32_t v = 0; v < 20; ++v) {
    b.vertices.push_back(v);
    const std::uint32_t cls = v % 2;
    b.features.cols.push_back(cls == 0 ? 0 : 1);
    b.features.cols.push_back(2 + (v / 2) % 2);
    b.features.row_ptr.push_back(b.features.cols.size());
    b.targets.push_back(v);
    b.labels.push_back(cls);
  }
  Adam adam(net.params());
  std::vector<double> losses;
  for (int i = 0; i < 50; ++i) {
    std::vector<Tensor> g;
    Rng r(0);
    losses.push_back(net.loss(b, r, &g));
    adam.step(net.params(), g, cfg.lr);
  }
  for (std::size_t i = 6; i < losses.size(); ++i) EXPECT_LT(losses[i], losses[i - 1]) << "step " << i;
}

TEST(Training, DeterministicForSeed) {
  auto run = [] {
    Network net(small(Architecture::kGraphMlp), 6, 4, 11);
    const auto b = support::random_batch(5, 9, 6, 4, 6, 14);
    Adam adam(net.params());
    for (int i = 0; i < 5; ++i) {
      std::vector<Tensor> g;
      Rng r(static_cast<std::uint64_t>(i));
      net.loss(b, r, &g);
      adam.step(net.params(), g, 0.01);
    }
    return net;
  };
  const auto a = run(), b = run();
  for (std::size_t i = 0; i < a.params().size(); ++i) EXPECT_TRUE(bit_equal(a.params()[i].value, b.params()[i].value));
}

TEST(ModelConfigTest, DefaultsAndHops) {
  const auto mlp = ModelConfig::defaults(Architecture::kMlp);
  EXPECT_EQ(mlp.hidden, std::vector<std::size_t>{1024});
  EXPECT_EQ(mlp.dropout, 0.5);
  EXPECT_EQ(mlp.lr, 0.01);
  const auto gm = ModelConfig::defaults(Architecture::kGraphMlp);
  EXPECT_EQ(gm.hidden, std::vector<std::size_t>{64});
  EXPECT_EQ(gm.dropout, 0.2);
  EXPECT_EQ(gm.alpha, 1.0);
  EXPECT_EQ(gm.tau, 2.0);
  const auto gcn = ModelConfig::defaults(Architecture::kGcn);
  EXPECT_EQ(gcn.hidden, std::vector<std::size_t>{64});
  EXPECT_EQ(gcn.lr, 0.1);
  EXPECT_EQ(gcn.dropout, 0.0);
  EXPECT_EQ(ModelConfig::defaults(Architecture::kGcnEdges).hidden, (std::vector<std::size_t>{32, 32}));
  EXPECT_EQ(gcn.train_hops(summary::SummaryModel::kAc2), 2);
  EXPECT_EQ(mlp.train_hops(summary::SummaryModel::kAc2), 0);
  EXPECT_EQ(gm.train_hops(summary::SummaryModel::kAc1), 1);
  EXPECT_EQ(gm.eval_hops(summary::SummaryModel::kAc1), 0);
  EXPECT_THROW(parse_architecture("gat"), ConfigError);
}

TEST(Checkpoint, BitExactRoundTrip) {
  for (auto a : {Architecture::kMlp, Architecture::kGraphMlp, Architecture::kGcn, Architecture::kGcnEdges}) {
    Checkpoint c{Network(small(a), 3, 2, 4), {}, {}, {}};
    const std::vector<std::string> preds{"http://a", "http://b", "http://c"};
    c.predicates.extend(preds);
    const std::vector<summary::EqcHash> classes{{7}, {3}};
    c.classes.extend(classes);
    c.meta = {42, 1, "ac2", "2024-01-02"};
    const std::string bytes = encode_checkpoint(c);
    EXPECT_EQ(bytes.substr(0, 4), "GSLC");
    const Checkpoint d = decode_checkpoint(bytes);
    EXPECT_EQ(encode_checkpoint(d), bytes);
    EXPECT_EQ(d.meta.seed, 42u);
    EXPECT_EQ(d.meta.summary_model, "ac2");
    EXPECT_EQ(d.predicates.entries(), c.predicates.entries());
    EXPECT_EQ(d.classes.entries(), c.classes.entries());
    EXPECT_EQ(d.network.config().arch, a);
    for (std::size_t i = 0; i < c.network.params().size(); ++i) {
      EXPECT_TRUE(bit_equal(c.network.params()[i].value, d.network.params()[i].value));
    }
  }
}

TEST(Checkpoint, RejectsCorruption) {
  Checkpoint c{Network(small(Architecture::kMlp), 3, 2, 4), {}, {}, {}};
  const std::vector<std::string> preds{"http://a", "http://b", "http://c"};
  c.predicates.extend(preds);
  const std::vector<summary::EqcHash> classes{{1}, {2}};
  c.classes.extend(classes);
  std::string bytes = encode_checkpoint(c);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), IoError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(decode_checkpoint(bad_version), IoError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), IoError);
  EXPECT_THROW(decode_checkpoint(""), IoError);
  const fs::path p = fs::temp_directory_path() / "sumlife_ckpt_test.ckpt";
  save_checkpoint(c, p);
  EXPECT_EQ(encode_checkpoint(load_checkpoint(p)), bytes);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), IoError);
}
