#pragma once

// Incremental training over snapshot sequences, the T×T result matrix and
// the lifelong-learning measures computed from it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sumlife/checkpoint.hpp"
#include "sumlife/features.hpp"
#include "sumlife/nn.hpp"
#include "sumlife/rdf.hpp"
#include "sumlife/summarizer.hpp"

namespace sumlife::lifelong {

// ---- measures -------------------------------------------------------------

/// R[i][j]: accuracy on task j after training through task i (0-based storage).
using ResultMatrix = std::vector<std::vector<double>>;

/// Throws std::invalid_argument unless R is non-empty and square.
void check_square(const ResultMatrix& r);

double acc(const ResultMatrix& r);
double bwt(const ResultMatrix& r);  // needs T >= 2
double fwt(const ResultMatrix& r);  // needs T >= 2, baseline R[i][i]
double alpha_ideal(const ResultMatrix& r);

struct Omega {
  double base = 0.0;
  double fresh = 0.0;  // Ω_new
  double all = 0.0;
};
/// Needs T >= 2 and α_ideal > 0.
Omega omega(const ResultMatrix& r);

/// F_k for 2 <= k <= T (k is 1-based, like the task numbering).
double forgetting(const ResultMatrix& r, std::size_t k);

struct LifelongReport {
  std::size_t tasks = 0;
  double acc = 0.0;
  std::optional<double> bwt;
  std::optional<double> fwt;
  std::optional<double> alpha_ideal;
  std::optional<Omega> omega;
  std::vector<std::pair<std::size_t, double>> forgetting;  // (k, F_k)
};

/// Every measure that is defined for R; undefined ones stay empty.
LifelongReport make_report(const ResultMatrix& r);

/// One row per trained-through task, %.17g so the values round-trip exactly.
std::string result_matrix_csv(const ResultMatrix& r);
ResultMatrix parse_result_matrix_csv(const std::string& text);  // throws IoError

// ---- sequences ------------------------------------------------------------

struct SequenceConfig {
  summary::SummaryModel model = summary::SummaryModel::kAc1;
  nn::ModelConfig network = nn::ModelConfig::defaults(nn::Architecture::kMlp);
  std::size_t iterations = 100;
  std::size_t batch_cap = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool include_rdf_type = false;
  std::size_t validate_every = 0;  // 0: never
};

/// One snapshot with everything training and evaluation need.
struct PreparedTask {
  std::string timestamp;
  std::shared_ptr<const rdf::SnapshotGraph> graph;
  summary::Summary summary;
  learn::Split split;
  learn::FeatureMatrix features;   // columns from the sequence vocabulary
  std::vector<std::uint32_t> labels;
  std::size_t predicate_width = 0; // cumulative vocabulary widths after this task
  std::size_t class_width = 0;
};

struct TaskSequence {
  SequenceConfig config;
  std::vector<PreparedTask> tasks;
  learn::PredicateVocabulary predicates;  // final; task t uses a prefix
  learn::ClassVocabulary classes;
};

/// Summarizes, grows vocabularies, encodes and splits every snapshot in
/// order. Throws ConfigError on an empty sequence.
TaskSequence prepare_sequence(std::vector<rdf::SnapshotGraph> graphs, const SequenceConfig& cfg);

/// Seed used for the vertex split; shared by every task of a run.
std::uint64_t split_seed(std::uint64_t run_seed);

enum class Restart { kWarm, kCold };
Restart parse_restart(std::string_view s);  // throws ConfigError
std::string_view to_string(Restart r);

struct Evaluation {
  double accuracy = 0.0;
  std::size_t tested = 0;
  std::size_t correct = 0;
  std::size_t unseen = 0;  // test vertices whose class the network cannot emit
  double unseen_fraction() const { return tested == 0 ? 0.0 : static_cast<double>(unseen) / static_cast<double>(tested); }
};

/// Accuracy over the task's test split (or the given split tag).
Evaluation evaluate(const nn::Network& net, const PreparedTask& task, const SequenceConfig& cfg,
                    learn::SplitTag tag = learn::SplitTag::kTest);

struct TrainDiagnostics {
  std::vector<double> losses;  // per iteration
  std::vector<std::pair<std::size_t, double>> validation;  // (iteration, accuracy)
};

/// Trains in place for cfg.iterations steps with a fresh Adam state. Seeds
/// derive from (cfg.seed, task_index). NaN aborts with NumericalError naming
/// the task and step.
TrainDiagnostics train_task(nn::Network& net, const PreparedTask& task, const SequenceConfig& cfg,
                            std::uint64_t task_index);

struct TaskDiagnostics {
  TrainDiagnostics training;
  std::vector<Evaluation> evaluations;  // one per evaluated task
};

struct SequenceResult {
  std::vector<nn::Checkpoint> checkpoints;
  ResultMatrix r;
  std::vector<TaskDiagnostics> diagnostics;
};

using TaskCallback = std::function<void(std::size_t task, const nn::Checkpoint&)>;

SequenceResult run_sequence(const TaskSequence& seq, Restart restart, const TaskCallback& on_task = {});

/// Vocabulary prefixes that task t's checkpoint carries.
learn::PredicateVocabulary predicate_prefix(const learn::PredicateVocabulary& v, std::size_t n);
learn::ClassVocabulary class_prefix(const learn::ClassVocabulary& v, std::size_t n);

/// Prepares a single snapshot against existing vocabularies, extending them
/// with its unseen predicates and classes.
PreparedTask prepare_task(const rdf::SnapshotGraph& g, learn::PredicateVocabulary& predicates,
                          learn::ClassVocabulary& classes, const SequenceConfig& cfg);

struct TimeWarpResult {
  Evaluation frozen;     // old checkpoint, no growth, no training
  Evaluation retrained;  // old checkpoint grown and trained on the new task
  Evaluation cold;       // fresh network trained on the new task
};

/// Applies an old checkpoint to a new snapshot. The task's vocabularies are
/// the old ones extended by the new snapshot.
TimeWarpResult time_warp(const nn::Checkpoint& old, const rdf::SnapshotGraph& next, const SequenceConfig& cfg);

}  // namespace sumlife::lifelong
