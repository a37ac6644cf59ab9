#include <gtest/gtest.h>

#include <cmath>

#include "sumlife/checkpoint.hpp"
#include "sumlife/lifelong.hpp"
#include "sumlife/synth.hpp"

using namespace sumlife;
using namespace sumlife::lifelong;

namespace {

const ResultMatrix kFixture{{0.9, 0.4, 0.3}, {0.8, 0.85, 0.5}, {0.7, 0.6, 0.8}};

ResultMatrix constant(std::size_t t, double c) { return ResultMatrix(t, std::vector<double>(t, c)); }

double round4(double x) { return std::round(x * 1e4) / 1e4; }

SequenceConfig quick_config(std::uint64_t seed = 3) {
  SequenceConfig cfg;
  cfg.network = nn::ModelConfig::defaults(nn::Architecture::kMlp);
  cfg.network.hidden = {64};
  cfg.iterations = 30;
  cfg.batch_cap = 200;
  cfg.seed = seed;
  return cfg;
}

std::vector<rdf::SnapshotGraph> drift(std::size_t tasks = 3) {
  synth::DriftSpec d;
  d.tasks = tasks;
  d.vertices = 200;
  d.shared_classes = 3;
  d.unique_classes = 3;
  d.seed = 5;
  return synth::drift_sequence(d);
}

}  // namespace

TEST(Measures, FixtureValues) {
  // Exact rationals: ACC 7/10, BWT -9/40, FWT -3/8, Ω_base 5/6, Ω_new 33/40, Ω_all 85/108, F_3 9/40.
  EXPECT_NEAR(acc(kFixture), 0.7, 1e-9);
  EXPECT_NEAR(bwt(kFixture), -0.225, 1e-9);
  EXPECT_NEAR(fwt(kFixture), -0.375, 1e-9);
  EXPECT_EQ(alpha_ideal(kFixture), 0.9);
  const Omega o = omega(kFixture);
  EXPECT_NEAR(o.base, 5.0 / 6.0, 1e-9);
  EXPECT_NEAR(o.fresh, 0.825, 1e-9);
  EXPECT_NEAR(o.all, 85.0 / 108.0, 1e-9);
  EXPECT_EQ(round4(o.base), 0.8333);
  EXPECT_EQ(round4(o.all), 0.7870);
  EXPECT_NEAR(forgetting(kFixture, 3), 0.225, 1e-9);
  EXPECT_NEAR(forgetting(kFixture, 2), 0.1, 1e-9);
}

TEST(Measures, ConstantMatrices) {
  for (double c : {0.25, 0.5, 1.0}) {
    for (std::size_t t : {2u, 3u, 5u}) {
      const auto r = constant(t, c);
      EXPECT_EQ(acc(r), c);
      EXPECT_EQ(bwt(r), 0.0);
      EXPECT_EQ(fwt(r), 0.0);
      const Omega o = omega(r);
      EXPECT_EQ(o.base, 1.0);
      EXPECT_EQ(o.fresh, c);
      EXPECT_EQ(o.all, 1.0);
      for (std::size_t k = 2; k <= t; ++k) EXPECT_EQ(forgetting(r, k), 0.0);
    }
  }
}

TEST(Measures, SignProperties) {
  const ResultMatrix improving{{0.2, 0.1, 0.0}, {0.5, 0.6, 0.1}, {0.7, 0.8, 0.9}};
  EXPECT_GE(bwt(improving), 0.0);
  EXPECT_LT(forgetting(improving, 3), 0.0);
  const ResultMatrix dominant{{0.9, 0.1, 0.1}, {0.5, 0.8, 0.2}, {0.4, 0.3, 0.7}};
  EXPECT_DOUBLE_EQ(omega(dominant).fresh, (0.8 + 0.7) / 2.0);
}

TEST(Measures, Errors) {
  const ResultMatrix one{{0.5}};
  EXPECT_EQ(acc(one), 0.5);
  EXPECT_THROW(bwt(one), std::invalid_argument);
  EXPECT_THROW(fwt(one), std::invalid_argument);
  EXPECT_THROW(omega(constant(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(check_square({{0.1, 0.2}}), std::invalid_argument);
  EXPECT_THROW(check_square({}), std::invalid_argument);
  EXPECT_THROW(forgetting(kFixture, 1), std::invalid_argument);
  EXPECT_THROW(forgetting(kFixture, 4), std::invalid_argument);
  const auto rep = make_report(one);
  EXPECT_FALSE(rep.bwt.has_value());
  EXPECT_FALSE(rep.omega.has_value());
  EXPECT_TRUE(rep.forgetting.empty());
  const auto zero = make_report(constant(2, 0.0));
  EXPECT_TRUE(zero.bwt.has_value());
  EXPECT_FALSE(zero.omega.has_value());
}

TEST(Measures, CsvRoundTripIsExact) {
  const ResultMatrix r{{0.1 + 0.2, 1.0 / 3.0}, {2.0 / 7.0, 0.987654321987654321}};
  const auto back = parse_result_matrix_csv(result_matrix_csv(r));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(back[i][j], r[i][j]);
  }
  EXPECT_THROW(parse_result_matrix_csv("0.1,0.2\n0.3\n"), IoError);
  EXPECT_THROW(parse_result_matrix_csv("0.1,x\n0.3,0.4\n"), IoError);
}

TEST(Sequence, SingleTask) {
  auto graphs = drift(1);
  const auto seq = prepare_sequence(std::move(graphs), quick_config());
  const auto res = run_sequence(seq, Restart::kWarm);
  ASSERT_EQ(res.r.size(), 1u);
  ASSERT_EQ(res.checkpoints.size(), 1u);
  EXPECT_EQ(res.r[0][0], evaluate(res.checkpoints[0].network, seq.tasks[0], seq.config).accuracy);
  EXPECT_EQ(res.diagnostics[0].training.losses.size(), 30u);
}

TEST(Sequence, VocabulariesArePrefixesAndWidthsCumulative) {
  const auto seq = prepare_sequence(drift(), quick_config());
  std::size_t prev_p = 0, prev_c = 0;
  for (const auto& t : seq.tasks) {
    EXPECT_GE(t.predicate_width, prev_p);
    EXPECT_GT(t.class_width, prev_c);
    prev_p = t.predicate_width;
    prev_c = t.class_width;
  }
  EXPECT_EQ(prev_p, seq.predicates.width());
  EXPECT_EQ(prev_c, seq.classes.width());
  const auto res = run_sequence(seq, Restart::kWarm);
  for (std::size_t i = 0; i < seq.tasks.size(); ++i) {
    EXPECT_EQ(res.checkpoints[i].network.class_count(), seq.tasks[i].class_width);
    EXPECT_EQ(res.checkpoints[i].classes.width(), seq.tasks[i].class_width);
    EXPECT_EQ(res.checkpoints[i].meta.task, i);
  }
}

TEST(Sequence, DeterministicAndThreadIndependent) {
  auto run = [](unsigned threads) {
    auto cfg = quick_config();
    cfg.threads = threads;
    return run_sequence(prepare_sequence(drift(), cfg), Restart::kWarm);
  };
  const auto a = run(1), b = run(1), c = run(3);
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.r, c.r);
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    EXPECT_EQ(nn::encode_checkpoint(a.checkpoints[i]), nn::encode_checkpoint(b.checkpoints[i]));
    EXPECT_EQ(nn::encode_checkpoint(a.checkpoints[i]), nn::encode_checkpoint(c.checkpoints[i]));
  }
}

TEST(Sequence, WarmAndColdShareFirstRow) {
  const auto seq = prepare_sequence(drift(), quick_config());
  const auto warm = run_sequence(seq, Restart::kWarm);
  const auto cold = run_sequence(seq, Restart::kCold);
  EXPECT_EQ(warm.r[0], cold.r[0]);
  for (const auto& row : warm.r) {
    for (double x : row) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Sequence, IdenticalSnapshotsGiveEqualRows) {
  synth::PatternGraphSpec spec;
  spec.vertices = 200;
  spec.patterns = synth::binary_patterns(6, "http://example.org/p/");
  spec.seed = 2;
  std::vector<rdf::SnapshotGraph> graphs;
  for (std::size_t t = 0; t < 3; ++t) graphs.push_back(synth::pattern_graph(spec, synth::task_timestamp(t)));
  const auto res = run_sequence(prepare_sequence(std::move(graphs), quick_config()), Restart::kWarm);
  for (const auto& row : res.r) {
    for (double x : row) EXPECT_NEAR(x, row[0], 0.02);
  }
}

TEST(Sequence, CallbackSeesEveryTask) {
  std::vector<std::size_t> seen;
  run_sequence(prepare_sequence(drift(2), quick_config()), Restart::kCold,
               [&](std::size_t i, const nn::Checkpoint&) { seen.push_back(i); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1}));
}

TEST(Sequence, ErrorsAreReported) {
  EXPECT_THROW(prepare_sequence({}, quick_config()), ConfigError);
  auto cfg = quick_config();
  cfg.batch_cap = 0;
  EXPECT_THROW(prepare_sequence(drift(1), cfg), ConfigError);
  EXPECT_THROW(parse_restart("lukewarm"), ConfigError);
  EXPECT_EQ(parse_restart("cold"), Restart::kCold);
}

TEST(TimeWarp, FrozenOnIdenticalTaskEqualsDiagonal) {
  auto graphs = drift(1);
  const rdf::SnapshotGraph copy = graphs[0];
  const auto cfg = quick_config();
  const auto res = run_sequence(prepare_sequence(std::move(graphs), cfg), Restart::kWarm);
  const auto tw = time_warp(res.checkpoints[0], copy, cfg);
  EXPECT_EQ(tw.frozen.accuracy, res.r[0][0]);
  EXPECT_EQ(tw.frozen.unseen, 0u);
}

TEST(TimeWarp, DisjointClassesAreUnseen) {
  auto pair = synth::disjoint_pair(200, 4, 1);
  const rdf::SnapshotGraph second = pair[1];
  pair.pop_back();
  const auto cfg = quick_config();
  const auto res = run_sequence(prepare_sequence(std::move(pair), cfg), Restart::kWarm);
  const auto tw = time_warp(res.checkpoints[0], second, cfg);
  EXPECT_LT(tw.frozen.accuracy, 0.05);
  EXPECT_EQ(tw.frozen.unseen, tw.frozen.tested);
  EXPECT_GT(tw.retrained.accuracy, 0.5);
  EXPECT_GT(tw.cold.accuracy, 0.5);
}

TEST(TimeWarp, ModelMismatchIsConfigError) {
  const auto cfg = quick_config();
  const auto res = run_sequence(prepare_sequence(drift(1), cfg), Restart::kWarm);
  auto other = cfg;
  other.model = summary::SummaryModel::kAc2;
  EXPECT_THROW(time_warp(res.checkpoints[0], drift(1)[0], other), ConfigError);
}
