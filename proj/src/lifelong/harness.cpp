#include <limits>
#include <stdexcept>
#include <string>

#include "sumlife/common.hpp"
#include "sumlife/lifelong.hpp"
#include "sumlife/parallel.hpp"

namespace sumlife::lifelong {

namespace {

std::uint64_t task_seed(std::uint64_t run_seed, std::uint64_t task, SeedPurpose purpose) {
  return derive_seed(run_seed, task, static_cast<std::uint64_t>(purpose));
}

learn::BatchOptions batch_options(const nn::Network& net, const SequenceConfig& cfg, int hops) {
  learn::BatchOptions o;
  o.hops = hops;
  o.cap = cfg.batch_cap;
  o.feature_width = net.input_width();
  o.include_rdf_type = cfg.include_rdf_type;
  return o;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t run_seed) {
  return derive_seed(run_seed, std::numeric_limits<std::uint64_t>::max(),
                     static_cast<std::uint64_t>(SeedPurpose::kSplit));
}

Restart parse_restart(std::string_view s) {
  if (s == "warm") return Restart::kWarm;
  if (s == "cold") return Restart::kCold;
  throw ConfigError("unknown restart mode '" + std::string(s) + "' (expected warm or cold)");
}

std::string_view to_string(Restart r) { return r == Restart::kWarm ? "warm" : "cold"; }

TaskSequence prepare_sequence(std::vector<rdf::SnapshotGraph> graphs, const SequenceConfig& cfg) {
  if (graphs.empty()) throw ConfigError("a task sequence needs at least one snapshot");
  cfg.network.validate();
  if (cfg.batch_cap < 1) throw ConfigError("batch cap must be >= 1");
  TaskSequence seq;
  seq.config = cfg;
  summary::SummaryOptions sopts;
  sopts.include_rdf_type = cfg.include_rdf_type;
  sopts.threads = cfg.threads;
  for (auto& g : graphs) {
    PreparedTask t;
    t.timestamp = g.timestamp();
    t.summary = summary::summarize(g, cfg.model, sopts);
    learn::extend_vocabularies(g, t.summary.graph, seq.predicates, seq.classes, cfg.include_rdf_type);
    t.predicate_width = seq.predicates.width();
    t.class_width = seq.classes.width();
    t.graph = std::make_shared<const rdf::SnapshotGraph>(std::move(g));
    seq.tasks.push_back(std::move(t));
  }
  const std::uint64_t sseed = split_seed(cfg.seed);
  for (auto& t : seq.tasks) {
    t.features = learn::encode_features(*t.graph, seq.predicates, cfg.include_rdf_type);
    t.labels = learn::vertex_labels(t.summary.ext, seq.classes);
    t.split = learn::split_vertices(*t.graph, sseed);
  }
  return seq;
}

Evaluation evaluate(const nn::Network& net, const PreparedTask& task, const SequenceConfig& cfg,
                    learn::SplitTag tag) {
  const auto targets = task.split.of(tag);
  const auto opts = batch_options(net, cfg, net.config().eval_hops(cfg.model));
  Evaluation e;
  std::size_t pos = 0;
  learn::Subgraph b;
  while (pos < targets.size()) {
    const std::span<const VertexId> rest(targets.data() + pos, targets.size() - pos);
    pos += learn::build_batch(*task.graph, task.features, task.labels, rest, opts, b);
    if (net.config().edge_as_vertex()) b = learn::edge_as_vertex_transform(b);
    const auto pred = net.predict(b);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      ++e.tested;
      if (b.labels[i] >= net.class_count()) {
        ++e.unseen;
      } else if (pred[i] == b.labels[i]) {
        ++e.correct;
      }
    }
  }
  e.accuracy = e.tested == 0 ? 0.0 : static_cast<double>(e.correct) / static_cast<double>(e.tested);
  return e;
}

TrainDiagnostics train_task(nn::Network& net, const PreparedTask& task, const SequenceConfig& cfg,
                            std::uint64_t task_index) {
  TrainDiagnostics diag;
  const learn::ClassBalancedSampler sampler(task.labels, task.split);
  if (sampler.class_count() == 0) {
    throw ConfigError("task " + std::to_string(task_index) + " (" + task.timestamp + ") has an empty train split");
  }
  const auto opts = batch_options(net, cfg, net.config().train_hops(cfg.model));
  Rng batch_rng(task_seed(cfg.seed, task_index, SeedPurpose::kTrain));
  Rng dropout_rng(task_seed(cfg.seed, task_index, SeedPurpose::kDropout));
  nn::Adam adam(net.params());
  std::vector<nn::Tensor> grads;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    learn::Subgraph b = learn::sample_batch(*task.graph, task.features, task.labels, sampler, opts, batch_rng);
    if (net.config().edge_as_vertex()) b = learn::edge_as_vertex_transform(b);
    try {
      diag.losses.push_back(net.loss(b, dropout_rng, &grads));
    } catch (const NumericalError& e) {
      throw NumericalError("training diverged on task " + std::to_string(task_index) + " (" + task.timestamp +
                           ") at step " + std::to_string(it) + ": " + e.what());
    }
    adam.step(net.params(), grads, net.config().lr);
    if (cfg.validate_every > 0 && (it + 1) % cfg.validate_every == 0) {
      diag.validation.emplace_back(it + 1, evaluate(net, task, cfg, learn::SplitTag::kValidation).accuracy);
    }
  }
  return diag;
}

learn::PredicateVocabulary predicate_prefix(const learn::PredicateVocabulary& v, std::size_t n) {
  const auto& e = v.entries();
  return learn::PredicateVocabulary::from_entries({e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n)});
}

learn::ClassVocabulary class_prefix(const learn::ClassVocabulary& v, std::size_t n) {
  const auto& e = v.entries();
  return learn::ClassVocabulary::from_entries({e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n)});
}

SequenceResult run_sequence(const TaskSequence& seq, Restart restart, const TaskCallback& on_task) {
  const auto& cfg = seq.config;
  const std::size_t t_count = seq.tasks.size();
  SequenceResult res;
  res.r.assign(t_count, std::vector<double>(t_count, 0.0));
  std::optional<nn::Network> prev;
  for (std::size_t i = 0; i < t_count; ++i) {
    const PreparedTask& task = seq.tasks[i];
    std::optional<nn::Network> net;
    if (restart == Restart::kWarm && prev) {
      net = std::move(*prev);
      Rng grow_rng(task_seed(cfg.seed, i, SeedPurpose::kGrow));
      net->grow(task.predicate_width, task.class_width, grow_rng);
    } else {
      net.emplace(cfg.network, task.predicate_width, task.class_width, task_seed(cfg.seed, i, SeedPurpose::kInit));
    }

    TaskDiagnostics diag;
    diag.training = train_task(*net, task, cfg, i);

    diag.evaluations.resize(t_count);
    const nn::Network& frozen = *net;
    parallel_for(t_count, cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) diag.evaluations[j] = evaluate(frozen, seq.tasks[j], cfg);
    });
    for (std::size_t j = 0; j < t_count; ++j) res.r[i][j] = diag.evaluations[j].accuracy;

    nn::CheckpointMeta meta;
    meta.seed = cfg.seed;
    meta.task = i;
    meta.summary_model = std::string(summary::to_string(cfg.model));
    meta.timestamp = task.timestamp;
    res.checkpoints.push_back(nn::Checkpoint{*net, predicate_prefix(seq.predicates, task.predicate_width),
                                             class_prefix(seq.classes, task.class_width), meta});
    if (on_task) on_task(i, res.checkpoints.back());
    res.diagnostics.push_back(std::move(diag));
    prev = std::move(net);
  }
  return res;
}

PreparedTask prepare_task(const rdf::SnapshotGraph& g, learn::PredicateVocabulary& predicates,
                          learn::ClassVocabulary& classes, const SequenceConfig& cfg) {
  PreparedTask task;
  task.timestamp = g.timestamp();
  task.graph = std::make_shared<const rdf::SnapshotGraph>(g);
  summary::SummaryOptions sopts;
  sopts.include_rdf_type = cfg.include_rdf_type;
  sopts.threads = cfg.threads;
  task.summary = summary::summarize(g, cfg.model, sopts);
  learn::extend_vocabularies(g, task.summary.graph, predicates, classes, cfg.include_rdf_type);
  task.predicate_width = predicates.width();
  task.class_width = classes.width();
  task.features = learn::encode_features(g, predicates, cfg.include_rdf_type);
  task.labels = learn::vertex_labels(task.summary.ext, classes);
  task.split = learn::split_vertices(g, split_seed(cfg.seed));
  return task;
}

TimeWarpResult time_warp(const nn::Checkpoint& old, const rdf::SnapshotGraph& next, const SequenceConfig& cfg) {
  if (old.meta.summary_model != summary::to_string(cfg.model)) {
    throw ConfigError("checkpoint was trained on " + old.meta.summary_model + " summaries, not " +
                      std::string(summary::to_string(cfg.model)));
  }
  SequenceConfig wcfg = cfg;
  wcfg.network = old.network.config();

  learn::PredicateVocabulary predicates = old.predicates;
  learn::ClassVocabulary classes = old.classes;
  const PreparedTask task = prepare_task(next, predicates, classes, cfg);

  const std::uint64_t index = old.meta.task + 1;
  TimeWarpResult out;
  out.frozen = evaluate(old.network, task, wcfg);

  nn::Network warm = old.network;
  Rng grow_rng(task_seed(cfg.seed, index, SeedPurpose::kGrow));
  warm.grow(task.predicate_width, task.class_width, grow_rng);
  train_task(warm, task, wcfg, index);
  out.retrained = evaluate(warm, task, wcfg);

  nn::Network cold(wcfg.network, task.predicate_width, task.class_width, task_seed(cfg.seed, index, SeedPurpose::kInit));
  train_task(cold, task, wcfg, index);
  out.cold = evaluate(cold, task, wcfg);
  return out;
}

}  // namespace sumlife::lifelong
