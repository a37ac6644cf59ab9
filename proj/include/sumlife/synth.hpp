#pragma once

// Seeded synthetic snapshot generators for tests, benchmarks and demos.

#include <cstdint>
#include <string>
#include <vector>

#include "sumlife/rdf.hpp"

namespace sumlife::synth {

/// Predicate set of one AC1 class.
using Pattern = std::vector<std::string>;

/// `count` distinct non-empty predicate subsets over `prefix` + "p<i>":
/// pattern k uses the predicates at the set bits of k + 1.
std::vector<Pattern> binary_patterns(std::size_t count, const std::string& prefix);

struct PatternGraphSpec {
  std::size_t vertices = 500;
  std::vector<Pattern> patterns;
  std::string vertex_prefix = "http://example.org/v/";
  /// Objects become literals instead of pool vertices; this adds the sink class.
  bool literal_objects = false;
  std::uint64_t seed = 0;
};

/// Vertex i carries pattern i for i < #patterns, a random pattern otherwise,
/// with one or two edges per predicate to random pool vertices. Without
/// literal objects the AC1 classes are exactly the patterns.
rdf::SnapshotGraph pattern_graph(const PatternGraphSpec& spec, std::string timestamp);

struct DriftSpec {
  std::size_t tasks = 3;
  std::size_t vertices = 500;
  std::size_t shared_classes = 4;  // present in every task
  std::size_t unique_classes = 4;  // new in each task
  std::uint64_t seed = 0;
};

/// Snapshots whose unique classes use task-specific predicate namespaces.
std::vector<rdf::SnapshotGraph> drift_sequence(const DriftSpec& spec);

/// Two snapshots without any class in common.
std::vector<rdf::SnapshotGraph> disjoint_pair(std::size_t vertices, std::size_t classes, std::uint64_t seed);

struct RandomGraphSpec {
  std::size_t vertices = 1000;
  std::size_t edges = 5000;
  std::size_t predicates = 8;
  double literal_fraction = 0.0;  // share of edges pointing at fresh literals
  std::uint64_t seed = 0;
};

/// Uniformly random multigraph (duplicates collapse, so edge_count may be
/// slightly lower than requested).
rdf::SnapshotGraph random_graph(const RandomGraphSpec& spec, std::string timestamp);

/// Timestamp label for task t: "2024-01-01" plus t days (t < 28).
std::string task_timestamp(std::size_t t);

}  // namespace sumlife::synth
