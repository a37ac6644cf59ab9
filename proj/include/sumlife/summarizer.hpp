#pragma once

// Hash-based k-hop attribute-collection summaries (AC1 / AC2).
//
// A vertex's level-0 hash is 0. Its level-(d+1) hash is the XOR over the
// *set* of (predicate, level-d hash of target) pairs of its outgoing edges,
// each pair hashed with SipHash-2-4 under a fixed key. AC_k uses level k.
// A vertex without considered outgoing edges hashes to 0 at every level.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sumlife/rdf.hpp"

namespace sumlife::summary {

struct EqcHash {
  std::uint64_t value = 0;
  auto operator<=>(const EqcHash&) const = default;
};

std::string to_hex(EqcHash h);
EqcHash parse_hex(std::string_view hex);

enum class SummaryModel : std::uint8_t { kAc1 = 1, kAc2 = 2 };

inline int hops(SummaryModel m) { return static_cast<int>(m); }
std::string_view to_string(SummaryModel m);
/// Accepts "ac1" / "ac2" (case-insensitive); throws ConfigError otherwise.
SummaryModel parse_model(std::string_view s);

struct SummaryOptions {
  bool include_rdf_type = false;
  unsigned threads = 1;
};

/// SipHash-2-4 under eqc_key() over: UTF-8 predicate IRI, one 0x00 byte,
/// then the 8 little-endian bytes of `child`.
std::uint64_t hash_pair(std::string_view predicate_iri, EqcHash child);

/// Level-k hash of a single vertex by direct recursion over its k-hop
/// out-neighborhood. Throws std::out_of_range for an unknown vertex.
EqcHash eqc_hash(const rdf::SnapshotGraph& g, VertexId v, int k, const SummaryOptions& opts = {});

/// Level-0..k hashes of every vertex, computed bottom-up one level at a time.
/// result[d][v] is the level-d hash of v.
std::vector<std::vector<EqcHash>> compute_levels(const rdf::SnapshotGraph& g, int k,
                                                 const SummaryOptions& opts = {});

/// Level-k hashes of every vertex.
std::vector<EqcHash> compute_eqcs(const rdf::SnapshotGraph& g, int k, const SummaryOptions& opts = {});

struct SecondaryVertex {
  std::uint32_t predicate;  // index into SummaryGraph::predicates
  EqcHash child;
  auto operator<=>(const SecondaryVertex&) const = default;
};

struct SummaryEdge {
  EqcHash source;
  std::uint32_t predicate;  // index into SummaryGraph::predicates
  EqcHash child;
  auto operator<=>(const SummaryEdge&) const = default;
};

/// S_t = (C ∪ D, E^S, R^S). All vectors are sorted and duplicate-free.
struct SummaryGraph {
  std::string timestamp;
  SummaryModel model = SummaryModel::kAc1;
  std::vector<EqcHash> eqcs;                   // primary vertices C
  std::vector<std::string> predicates;         // R^S, lexically sorted IRIs
  std::vector<std::uint64_t> predicate_usage;  // edges per predicate in G_t
  std::vector<SecondaryVertex> secondary;      // D
  std::vector<SummaryEdge> edges;              // E^S

  std::size_t primary_count() const { return eqcs.size(); }
  /// Index of h in eqcs, or -1.
  std::ptrdiff_t index_of(EqcHash h) const;
  bool contains(EqcHash h) const { return index_of(h) >= 0; }
};

/// ext_t: members of each EQC, aligned with SummaryGraph::eqcs.
struct ExtensionMap {
  std::vector<EqcHash> vertex_eqc;               // per vertex of G_t
  std::vector<std::uint64_t> sizes;              // |members| per EQC
  std::vector<std::vector<VertexId>> members;    // may be empty for imported summaries

  std::uint64_t total() const;
};

struct Summary {
  SummaryGraph graph;
  ExtensionMap ext;
};

Summary summarize(const rdf::SnapshotGraph& g, SummaryModel model, const SummaryOptions& opts = {});

/// `vertex-iri<TAB>eqc-hash-hex`, one line per vertex in vertex-id order.
void write_eqcs_tsv(const rdf::SnapshotGraph& g, const Summary& s, const std::filesystem::path& path);
/// `source-eqc<TAB>predicate<TAB>child-eqc`, one line per summary edge.
void write_summary_tsv(const SummaryGraph& s, const std::filesystem::path& path);

/// Reads eqcs.tsv / summary.tsv written by the two functions above. Member
/// lists are not reconstructed; sizes are.
Summary read_summary_tsv(const std::filesystem::path& eqcs_tsv,
                         const std::filesystem::path& summary_tsv, SummaryModel model,
                         std::string timestamp);

}  // namespace sumlife::summary

template <>
struct std::hash<sumlife::summary::EqcHash> {
  std::size_t operator()(const sumlife::summary::EqcHash& h) const noexcept {
    return static_cast<std::size_t>(h.value * 0x9E3779B97F4A7C15ull);
  }
};
