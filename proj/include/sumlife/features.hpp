#pragma once

// Growable vocabularies, multi-hot vertex features, vertex splits and the
// class-balanced capped subgraph sampler.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sumlife/rdf.hpp"
#include "sumlife/rng.hpp"
#include "sumlife/summarizer.hpp"

namespace sumlife::learn {

using summary::EqcHash;

/// Append-only predicate IRI -> feature column map.
class PredicateVocabulary {
 public:
  std::size_t width() const { return entries_.size(); }
  const std::vector<std::string>& entries() const { return entries_; }
  std::optional<std::uint32_t> find(std::string_view iri) const;
  /// Appends unseen predicates of g in lexical order; returns how many.
  std::size_t extend(const rdf::SnapshotGraph& g, bool include_rdf_type = false);
  std::size_t extend(std::span<const std::string> iris);

  void save(const std::filesystem::path& path) const;
  static PredicateVocabulary load(const std::filesystem::path& path);
  /// Rebuilds a vocabulary with exactly this order. Throws on duplicates.
  static PredicateVocabulary from_entries(std::vector<std::string> entries);

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Append-only EqcHash -> class index map.
class ClassVocabulary {
 public:
  std::size_t width() const { return entries_.size(); }
  const std::vector<EqcHash>& entries() const { return entries_; }
  std::optional<std::uint32_t> find(EqcHash h) const;
  /// Appends unseen EQCs of s in ascending hash order; returns how many.
  std::size_t extend(const summary::SummaryGraph& s);
  std::size_t extend(std::span<const EqcHash> hashes);

  void save(const std::filesystem::path& path) const;
  static ClassVocabulary load(const std::filesystem::path& path);
  static ClassVocabulary from_entries(std::vector<EqcHash> entries);

 private:
  std::vector<EqcHash> entries_;
  std::unordered_map<EqcHash, std::uint32_t> index_;
};

struct VocabularyGrowth {
  std::size_t new_predicates = 0;
  std::size_t new_classes = 0;
};

VocabularyGrowth extend_vocabularies(const rdf::SnapshotGraph& g, const summary::SummaryGraph& s,
                                     PredicateVocabulary& predicates, ClassVocabulary& classes,
                                     bool include_rdf_type = false);

/// Multi-hot rows stored sparsely: row v lists the sorted distinct feature
/// columns set to 1.
struct FeatureMatrix {
  std::size_t width = 0;
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  // (predicate term, column) for the considered predicates of the encoded
  // graph, sorted by term; lets batch builders label edges.
  std::vector<std::pair<TermId, std::uint32_t>> predicate_columns;

  std::optional<std::uint32_t> column_of(TermId predicate) const;

  std::size_t rows() const { return row_ptr.size() - 1; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {cols.data() + row_ptr[r], cols.data() + row_ptr[r + 1]};
  }
  std::vector<double> dense_row(std::size_t r) const;
};

/// Throws std::out_of_range when g uses a predicate missing from vocab.
FeatureMatrix encode_features(const rdf::SnapshotGraph& g, const PredicateVocabulary& vocab,
                              bool include_rdf_type = false);

/// Class index per vertex. Throws std::out_of_range for an EQC missing from vocab.
std::vector<std::uint32_t> vertex_labels(const summary::ExtensionMap& ext,
                                         const ClassVocabulary& vocab);

enum class SplitTag : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

struct Split {
  std::vector<SplitTag> tags;  // per vertex
  std::vector<VertexId> of(SplitTag tag) const;
  std::size_t count(SplitTag tag) const;
};

/// 93% train / 2% validation / 5% test. Vertices are ordered by a seeded hash
/// of their term and cut at largest-remainder quotas, so the same IRI gets the
/// same rank key in every run and every snapshot.
Split split_vertices(const rdf::SnapshotGraph& g, std::uint64_t seed);

/// Largest-remainder apportionment of n into parts with the given weights.
std::vector<std::size_t> apportion(std::size_t n, std::span<const std::uint32_t> weights);

/// weight(c) ∝ 1 / count(c) over classes present, normalized to sum 1.
/// Returned in ascending class-index order.
std::vector<std::pair<std::uint32_t, double>> class_weights(std::span<const std::uint32_t> labels);

/// Per-vertex probability that makes every present class equally likely:
/// 1 / (#classes * count(class(v))).
std::vector<double> vertex_sampling_probs(std::span<const std::uint32_t> labels);

struct LocalEdge {
  std::uint32_t source;
  std::uint32_t predicate;  // feature column of the predicate (may be >= width)
  std::uint32_t target;
};

/// One training or evaluation batch: a vertex-induced subgraph.
struct Subgraph {
  std::vector<VertexId> vertices;     // distinct; targets first, then context;
                                      // kNoVertex for edge-as-vertex nodes
  std::vector<std::uint32_t> targets; // local row per target draw (repeats allowed)
  std::vector<std::uint32_t> labels;  // class per target draw
  std::vector<LocalEdge> edges;       // considered edges among batch vertices
  FeatureMatrix features;             // one row per local vertex
  int hops = 0;
  bool edge_as_vertex = false;

  std::size_t size() const { return vertices.size(); }
};

struct BatchOptions {
  int hops = 1;                          // 0: targets only
  std::size_t cap = 1000;                // max distinct vertices
  std::size_t feature_width = SIZE_MAX;  // columns >= this are dropped
  bool include_rdf_type = false;
};

/// Deterministic batch over given targets: adds each target's k-hop
/// out-closure until the next closure would exceed the cap (the first target
/// is always admitted). Returns the number of targets consumed.
std::size_t build_batch(const rdf::SnapshotGraph& g, const FeatureMatrix& features,
                        std::span<const std::uint32_t> labels, std::span<const VertexId> targets,
                        const BatchOptions& opts, Subgraph& out);

/// Draws training targets with replacement, uniformly over classes present in
/// the train split, then uniformly within the class.
class ClassBalancedSampler {
 public:
  ClassBalancedSampler(std::span<const std::uint32_t> labels, const Split& split);
  VertexId draw(Rng& rng) const;
  std::size_t class_count() const { return by_class_.size(); }

 private:
  std::vector<std::vector<VertexId>> by_class_;
};

/// Draws up to opts.cap targets; stops at the first draw whose closure would
/// push the batch beyond opts.cap vertices. Throws std::invalid_argument when
/// the train split is empty.
Subgraph sample_batch(const rdf::SnapshotGraph& g, const FeatureMatrix& features,
                      std::span<const std::uint32_t> labels, const ClassBalancedSampler& sampler,
                      const BatchOptions& opts, Rng& rng);

/// Replaces every edge (u, p, v) by u -> e_upv -> v where e_upv is a new
/// vertex whose feature row is one-hot at p. Requires hops == 2.
Subgraph edge_as_vertex_transform(const Subgraph& b);

}  // namespace sumlife::learn
