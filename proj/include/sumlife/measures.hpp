#pragma once

// Unary, binary and meta measures over sequences of summaries.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sumlife/summarizer.hpp"

namespace sumlife::measures {

using summary::EqcHash;
using summary::ExtensionMap;
using summary::Summary;
using summary::SummaryGraph;

/// (value, frequency) pairs, sorted by value descending.
using Histogram = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

struct SummaryStats {
  double avg_size = 0.0;   // Σ ext(q) / |C|
  double avg_edges = 0.0;  // |E^S| / |C|
  Histogram dist_attrs_per_eqc;
  Histogram dist_members_per_eqc;
  Histogram dist_predicate_usage;
};

/// Throws std::domain_error on an empty summary.
SummaryStats unary_stats(const SummaryGraph& s, const ExtensionMap& ext);

/// 1 - |C_a ∩ C_b| / |C_a ∪ C_b| over primary EQC sets; 0 when both are empty.
double jaccard_dist(const SummaryGraph& a, const SummaryGraph& b);

enum class JsNormalization : std::uint8_t {
  kExtensionMass,   // P(q) = ext(q) / Σ ext
  kSummaryVertices  // P(q) = ext(q) / |C|, the literal formula (does not sum to 1)
};

/// D(A,B) + D(B,A) with D(A,B) = Σ_{q ∈ C_B} P_A(q) log2(P_A(q) / P_B(q)),
/// zero-probability summands taken as 0.
double js_divergence(const Summary& a, const Summary& b,
                     JsNormalization norm = JsNormalization::kExtensionMass);

struct DiffReport {
  double jaccard = 0.0;
  double js_divergence = 0.0;
  std::uint64_t added = 0;
  std::uint64_t deleted = 0;
  std::uint64_t recurring = 0;
};

/// Compares `next` against `prev`. Throws ConfigError if the models differ.
DiffReport diff(const Summary& prev, const Summary& next,
                JsNormalization norm = JsNormalization::kExtensionMass);

struct MetaTrackEntry {
  std::uint64_t eqcs = 0;
  std::uint64_t added_vs_prev = 0;      // in t, not in t-1 (all of t for t = 0)
  std::uint64_t deleted_vs_prev = 0;    // in t-1, not in t
  std::uint64_t recurring_vs_prev = 0;  // in both
  std::uint64_t new_vs_first = 0;       // in t, not in snapshot 0
  std::uint64_t reappearing = 0;        // in t, not in t-1, seen before t-1
  std::uint64_t cumulative_seen = 0;    // |∪_{s<=t} C_s|
  std::vector<EqcHash> reappeared;      // the reappearing EQCs, sorted
};

struct MetaTrack {
  std::vector<MetaTrackEntry> entries;
};

/// Requires at least one summary.
MetaTrack meta_track(std::span<const SummaryGraph* const> seq);
MetaTrack meta_track(std::span<const Summary> seq);

/// Compensated sum used by every aggregate in this module.
double kahan_sum(std::span<const double> xs);

}  // namespace sumlife::measures
