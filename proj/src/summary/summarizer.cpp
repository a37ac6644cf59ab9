#include "sumlife/summarizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <stdexcept>

#include "sumlife/parallel.hpp"
#include "sumlife/siphash.hpp"

namespace sumlife::summary {

using rdf::SnapshotGraph;

std::string to_hex(EqcHash h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[(h.value >> (4 * (15 - i))) & 0xF];
  }
  return s;
}

EqcHash parse_hex(std::string_view hex) {
  if (hex.empty() || hex.size() > 16) throw std::invalid_argument("bad eqc hash: " + std::string(hex));
  std::uint64_t v = 0;
  for (char c : hex) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
    else throw std::invalid_argument("bad eqc hash: " + std::string(hex));
  }
  return EqcHash{v};
}

std::string_view to_string(SummaryModel m) { return m == SummaryModel::kAc1 ? "ac1" : "ac2"; }

SummaryModel parse_model(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ac1") return SummaryModel::kAc1;
  if (lower == "ac2") return SummaryModel::kAc2;
  throw ConfigError("unknown summary model '" + std::string(s) + "' (expected ac1 or ac2)");
}

std::uint64_t hash_pair(std::string_view predicate_iri, EqcHash child) {
  // Short predicates stay on the stack; long ones fall back to the heap.
  std::array<std::uint8_t, 256> stack_buf;
  std::vector<std::uint8_t> heap_buf;
  const std::size_t n = predicate_iri.size() + 9;
  std::uint8_t* buf = stack_buf.data();
  if (n > stack_buf.size()) {
    heap_buf.resize(n);
    buf = heap_buf.data();
  }
  std::memcpy(buf, predicate_iri.data(), predicate_iri.size());
  buf[predicate_iri.size()] = 0;
  for (int i = 0; i < 8; ++i) {
    buf[predicate_iri.size() + 1 + static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(child.value >> (8 * i));
  }
  return siphash24(eqc_key(), std::span<const std::uint8_t>(buf, n));
}

namespace {

bool considered(const SnapshotGraph& g, const rdf::OutEdge& e, const SummaryOptions& opts) {
  return opts.include_rdf_type || !g.is_type_edge(e);
}

EqcHash fold_pairs(const SnapshotGraph& g, std::vector<std::pair<TermId, EqcHash>>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::uint64_t acc = 0;
  for (const auto& [p, child] : pairs) acc ^= hash_pair(g.terms().lexical(p), child);
  return EqcHash{acc};
}

EqcHash recurse(const SnapshotGraph& g, VertexId v, int depth, const SummaryOptions& opts) {
  if (depth == 0) return EqcHash{0};
  std::vector<std::pair<TermId, EqcHash>> pairs;
  for (const auto& e : g.out_edges(v)) {
    if (!considered(g, e, opts)) continue;
    pairs.emplace_back(e.predicate, recurse(g, e.target, depth - 1, opts));
  }
  return fold_pairs(g, pairs);
}

}  // namespace

EqcHash eqc_hash(const SnapshotGraph& g, VertexId v, int k, const SummaryOptions& opts) {
  if (v >= g.vertex_count()) throw std::out_of_range("unknown vertex " + std::to_string(v));
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  return recurse(g, v, k, opts);
}

std::vector<std::vector<EqcHash>> compute_levels(const SnapshotGraph& g, int k,
                                                 const SummaryOptions& opts) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<EqcHash>> levels;
  levels.emplace_back(n, EqcHash{0});
  if (k == 0) return levels;

  // Level 1 only ever hashes (p, 0), so cache that per predicate.
  const auto& preds = g.predicates();
  std::vector<std::uint64_t> base_hash(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    base_hash[i] = hash_pair(g.terms().lexical(preds[i]), EqcHash{0});
  }
  auto pred_slot = [&preds](TermId p) {
    return static_cast<std::size_t>(std::lower_bound(preds.begin(), preds.end(), p) - preds.begin());
  };

  const unsigned threads = resolve_threads(opts.threads);
  for (int d = 1; d <= k; ++d) {
    const auto& prev = levels.back();
    std::vector<EqcHash> next(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<std::pair<TermId, EqcHash>> pairs;
      for (std::size_t v = begin; v < end; ++v) {
        pairs.clear();
        for (const auto& e : g.out_edges(static_cast<VertexId>(v))) {
          if (!considered(g, e, opts)) continue;
          pairs.emplace_back(e.predicate, d == 1 ? EqcHash{0} : prev[e.target]);
        }
        if (d == 1) {
          // Out-edges are sorted by predicate, so equal pairs are adjacent.
          std::uint64_t acc = 0;
          for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i > 0 && pairs[i].first == pairs[i - 1].first) continue;
            acc ^= base_hash[pred_slot(pairs[i].first)];
          }
          next[v] = EqcHash{acc};
        } else {
          next[v] = fold_pairs(g, pairs);
        }
      }
    });
    levels.push_back(std::move(next));
  }
  return levels;
}

std::vector<EqcHash> compute_eqcs(const SnapshotGraph& g, int k, const SummaryOptions& opts) {
  auto levels = compute_levels(g, k, opts);
  return std::move(levels.back());
}

std::ptrdiff_t SummaryGraph::index_of(EqcHash h) const {
  const auto it = std::lower_bound(eqcs.begin(), eqcs.end(), h);
  if (it == eqcs.end() || *it != h) return -1;
  return it - eqcs.begin();
}

std::uint64_t ExtensionMap::total() const {
  std::uint64_t t = 0;
  for (auto s : sizes) t += s;
  return t;
}

Summary summarize(const SnapshotGraph& g, SummaryModel model, const SummaryOptions& opts) {
  const int k = hops(model);
  auto levels = compute_levels(g, k, opts);
  const auto& eqc = levels[static_cast<std::size_t>(k)];
  const auto& child = levels[static_cast<std::size_t>(k - 1)];
  const std::size_t n = g.vertex_count();

  Summary out;
  SummaryGraph& s = out.graph;
  s.timestamp = g.timestamp();
  s.model = model;

  // Primary vertices and extensions.
  std::vector<VertexId> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<VertexId>(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return eqc[a] < eqc[b]; });
  for (std::size_t i = 0; i < n; ++i) {
    const EqcHash h = eqc[order[i]];
    if (s.eqcs.empty() || s.eqcs.back() != h) {
      s.eqcs.push_back(h);
      out.ext.members.emplace_back();
    }
    out.ext.members.back().push_back(order[i]);
  }
  out.ext.sizes.reserve(s.eqcs.size());
  for (const auto& m : out.ext.members) out.ext.sizes.push_back(m.size());
  out.ext.vertex_eqc = eqc;

  // R^S in lexical order, and a TermId -> rank map for the predicates in use.
  std::vector<TermId> considered_preds;
  for (TermId p : g.predicates()) {
    if (opts.include_rdf_type || !g.rdf_type() || p != *g.rdf_type()) considered_preds.push_back(p);
  }
  std::sort(considered_preds.begin(), considered_preds.end(), [&](TermId a, TermId b) {
    return g.terms().lexical(a) < g.terms().lexical(b);
  });
  std::vector<std::pair<TermId, std::uint32_t>> rank;
  rank.reserve(considered_preds.size());
  for (std::size_t i = 0; i < considered_preds.size(); ++i) {
    s.predicates.emplace_back(g.terms().lexical(considered_preds[i]));
    rank.emplace_back(considered_preds[i], static_cast<std::uint32_t>(i));
  }
  std::sort(rank.begin(), rank.end());
  auto rank_of = [&rank](TermId p) {
    return std::lower_bound(rank.begin(), rank.end(), std::pair<TermId, std::uint32_t>{p, 0})->second;
  };
  s.predicate_usage.assign(s.predicates.size(), 0);

  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& e : g.out_edges(static_cast<VertexId>(v))) {
      if (!considered(g, e, opts)) continue;
      const std::uint32_t p = rank_of(e.predicate);
      ++s.predicate_usage[p];
      s.edges.push_back(SummaryEdge{eqc[v], p, child[e.target]});
    }
  }
  std::sort(s.edges.begin(), s.edges.end());
  s.edges.erase(std::unique(s.edges.begin(), s.edges.end()), s.edges.end());
  s.secondary.reserve(s.edges.size());
  for (const auto& e : s.edges) s.secondary.push_back(SecondaryVertex{e.predicate, e.child});
  std::sort(s.secondary.begin(), s.secondary.end());
  s.secondary.erase(std::unique(s.secondary.begin(), s.secondary.end()), s.secondary.end());
  return out;
}

}  // namespace sumlife::summary
