#pragma once

// Streaming N-Triples / N-Quads ingestion into an interned snapshot graph.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sumlife/common.hpp"

namespace sumlife::rdf {

inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

enum class TermKind : std::uint8_t { kIri = 0, kBlank = 1, kLiteral = 2 };

/// Append-only interning table. Lexical forms:
///   IRI      -> the IRI without angle brackets
///   blank    -> "_:label"
///   literal  -> the literal exactly as written, quotes and suffix included
class TermTable {
 public:
  TermTable() = default;
  TermTable(const TermTable&) = delete;
  TermTable& operator=(const TermTable&) = delete;

  TermId intern(TermKind kind, std::string_view lexical);
  std::optional<TermId> find(TermKind kind, std::string_view lexical) const;

  TermKind kind(TermId id) const { return static_cast<TermKind>(keys_[id][0]); }
  std::string_view lexical(TermId id) const {
    return std::string_view(keys_[id]).substr(1);
  }
  /// N-Triples surface form: <iri>, _:label, or the literal text.
  std::string to_ntriples(TermId id) const;
  std::size_t size() const { return keys_.size(); }

 private:
  // Each key is one kind byte followed by the lexical form. std::deque keeps
  // element addresses stable so the index can hold views into it.
  std::deque<std::string> keys_;
  std::unordered_map<std::string_view, TermId> index_;
};

struct Triple {
  TermId subject;
  TermId predicate;
  TermId object;
  bool operator==(const Triple&) const = default;
};

enum class SkipReason : std::uint8_t { kBlank, kComment, kMalformed };

struct Skip {
  SkipReason reason;
  std::string detail;
};

using ParseResult = std::variant<Triple, Skip>;

/// Parses one physical line. A quad's graph label is accepted and dropped.
/// Terms are interned only when the whole statement is well formed.
/// `blank_scope` is prepended to blank-node labels so that labels from
/// different documents of one snapshot never collide.
ParseResult parse_line(std::string_view line, TermTable& table,
                       std::string_view blank_scope = {});

struct OutEdge {
  TermId predicate;
  VertexId target;
  auto operator<=>(const OutEdge&) const = default;
};

enum class DegreeMode : std::uint8_t { kTotal, kOut, kIn };

struct LoadStats {
  std::uint64_t lines = 0;
  std::uint64_t statements = 0;  // well-formed statements, duplicates included
  std::uint64_t comments = 0;
  std::uint64_t blank = 0;
  std::uint64_t malformed = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t skipped_lines() const { return malformed + duplicates; }
};

/// Immutable directed multigraph with labeled edges for one snapshot. Vertices
/// are dense ids; every vertex refers to a term in the shared TermTable.
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  const std::string& timestamp() const { return timestamp_; }
  const TermTable& terms() const { return *terms_; }
  const std::shared_ptr<const TermTable>& terms_ptr() const { return terms_; }

  std::size_t vertex_count() const { return vertex_terms_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  TermId vertex_term(VertexId v) const { return vertex_terms_[v]; }
  std::optional<VertexId> vertex_of(TermId t) const;
  std::optional<VertexId> find_vertex(std::string_view iri) const;

  /// Sorted by (predicate, target), duplicate-free.
  std::span<const OutEdge> out_edges(VertexId v) const {
    return {edges_.data() + offsets_[v], edges_.data() + offsets_[v + 1]};
  }
  std::size_t out_degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::vector<std::size_t> in_degrees() const;

  /// Sorted predicate set R_t (rdf:type included if present).
  const std::vector<TermId>& predicates() const { return predicates_; }
  std::optional<TermId> rdf_type() const { return rdf_type_; }
  bool is_type_edge(const OutEdge& e) const { return rdf_type_ && e.predicate == *rdf_type_; }

  const LoadStats& stats() const { return stats_; }
  std::uint64_t skipped_lines() const { return stats_.skipped_lines(); }

 private:
  friend class GraphBuilder;

  std::string timestamp_;
  std::shared_ptr<const TermTable> terms_;
  std::vector<TermId> vertex_terms_;
  std::vector<VertexId> term_vertex_;  // indexed by TermId, kNoVertex if absent
  std::vector<std::uint64_t> offsets_{0};
  std::vector<OutEdge> edges_;
  std::vector<TermId> predicates_;
  std::optional<TermId> rdf_type_;
  LoadStats stats_;
};

/// Accumulates vertices and edges, then freezes them into a SnapshotGraph.
/// Duplicate (s, p, o) edges collapse to one (set semantics).
class GraphBuilder {
 public:
  GraphBuilder(std::string timestamp, std::shared_ptr<TermTable> terms);

  TermTable& terms() { return *terms_; }
  VertexId add_vertex(TermId term);
  void add_edge(TermId subject, TermId predicate, TermId object);
  void add_triple(const Triple& t) { add_edge(t.subject, t.predicate, t.object); }
  LoadStats& stats() { return stats_; }

  /// Sorts, deduplicates (adding the count to stats().duplicates) and freezes.
  SnapshotGraph finish() &&;

 private:
  struct RawEdge {
    VertexId source;
    TermId predicate;
    VertexId target;
    auto operator<=>(const RawEdge&) const = default;
  };

  std::string timestamp_;
  std::shared_ptr<TermTable> terms_;
  std::vector<TermId> vertex_terms_;
  std::vector<VertexId> term_vertex_;
  std::vector<RawEdge> edges_;
  LoadStats stats_;
};

/// Loads one file or every regular file of a directory (sorted by name).
/// Files ending in ".gz" are decompressed. Throws IoError naming the file and
/// byte offset on read failure.
SnapshotGraph load_snapshot(const std::filesystem::path& path, std::string timestamp);

/// Same as load_snapshot but reads from an in-memory document.
SnapshotGraph load_snapshot_text(std::string_view text, std::string timestamp);

inline constexpr std::size_t kNoDegreeCap = std::numeric_limits<std::size_t>::max();

/// Removes every vertex whose degree exceeds `cap`, with all incident edges.
/// Degrees are computed once on the input graph (no cascade).
SnapshotGraph filter_high_degree(const SnapshotGraph& g, std::size_t cap,
                                 DegreeMode mode = DegreeMode::kTotal);

/// Writes the graph back out as N-Triples, one statement per edge.
void write_ntriples(const SnapshotGraph& g, const std::filesystem::path& path);

}  // namespace sumlife::rdf
