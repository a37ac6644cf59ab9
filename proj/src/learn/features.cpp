#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "sumlife/features.hpp"
#include "sumlife/siphash.hpp"

namespace sumlife::learn {

std::optional<std::uint32_t> FeatureMatrix::column_of(TermId predicate) const {
  const auto it = std::lower_bound(predicate_columns.begin(), predicate_columns.end(),
                                   std::pair<TermId, std::uint32_t>{predicate, 0});
  if (it == predicate_columns.end() || it->first != predicate) return std::nullopt;
  return it->second;
}

std::vector<double> FeatureMatrix::dense_row(std::size_t r) const {
  std::vector<double> out(width, 0.0);
  for (auto c : row(r)) out[c] = 1.0;
  return out;
}

FeatureMatrix encode_features(const rdf::SnapshotGraph& g, const PredicateVocabulary& vocab,
                              bool include_rdf_type) {
  FeatureMatrix m;
  m.width = vocab.width();
  for (TermId p : g.predicates()) {
    if (!include_rdf_type && g.rdf_type() && p == *g.rdf_type()) continue;
    const auto col = vocab.find(g.terms().lexical(p));
    if (!col) {
      throw std::out_of_range("predicate missing from vocabulary: " + std::string(g.terms().lexical(p)));
    }
    m.predicate_columns.emplace_back(p, *col);
  }
  // g.predicates() is sorted by term id already.
  m.row_ptr.reserve(g.vertex_count() + 1);
  std::vector<std::uint32_t> row;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    row.clear();
    for (const auto& e : g.out_edges(v)) {
      if (!include_rdf_type && g.is_type_edge(e)) continue;
      row.push_back(*m.column_of(e.predicate));
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    m.cols.insert(m.cols.end(), row.begin(), row.end());
    m.row_ptr.push_back(m.cols.size());
  }
  return m;
}

std::vector<std::uint32_t> vertex_labels(const summary::ExtensionMap& ext, const ClassVocabulary& vocab) {
  std::vector<std::uint32_t> labels;
  labels.reserve(ext.vertex_eqc.size());
  for (const auto& h : ext.vertex_eqc) {
    const auto c = vocab.find(h);
    if (!c) throw std::out_of_range("EQC missing from class vocabulary: " + summary::to_hex(h));
    labels.push_back(*c);
  }
  return labels;
}

std::vector<VertexId> Split::of(SplitTag tag) const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < tags.size(); ++v) {
    if (tags[v] == tag) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::size_t Split::count(SplitTag tag) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

std::vector<std::size_t> apportion(std::size_t n, std::span<const std::uint32_t> weights) {
  const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("apportion: weights sum to zero");
  std::vector<std::size_t> parts(weights.size());
  std::vector<std::pair<std::uint64_t, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::uint64_t scaled = static_cast<std::uint64_t>(n) * weights[i];
    parts[i] = static_cast<std::size_t>(scaled / total);
    assigned += parts[i];
    remainders.emplace_back(scaled % total, i);
  }
  // Largest remainder first; ties go to the earlier part.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++parts[remainders[i].second];
  return parts;
}

Split split_vertices(const rdf::SnapshotGraph& g, std::uint64_t seed) {
  const SipKey key{seed, 0x73706c6974763031ull};
  const std::size_t n = g.vertex_count();
  std::vector<std::pair<std::uint64_t, VertexId>> keyed(n);
  for (VertexId v = 0; v < n; ++v) {
    const TermId t = g.vertex_term(v);
    std::string material(1, static_cast<char>(g.terms().kind(t)));
    material.append(g.terms().lexical(t));
    keyed[v] = {siphash24(key, material), v};
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return g.terms().lexical(g.vertex_term(a.second)) < g.terms().lexical(g.vertex_term(b.second));
  });
  static constexpr std::uint32_t kWeights[] = {93, 2, 5};
  const auto parts = apportion(n, kWeights);
  Split s;
  s.tags.assign(n, SplitTag::kTrain);
  for (std::size_t i = 0; i < n; ++i) {
    SplitTag tag = SplitTag::kTrain;
    if (i >= parts[0]) tag = i < parts[0] + parts[1] ? SplitTag::kValidation : SplitTag::kTest;
    s.tags[keyed[i].second] = tag;
  }
  return s;
}

std::vector<std::pair<std::uint32_t, double>> class_weights(std::span<const std::uint32_t> labels) {
  if (labels.empty()) throw std::invalid_argument("class_weights needs at least one label");
  std::map<std::uint32_t, std::uint64_t> counts;
  for (auto c : labels) ++counts[c];
  double norm = 0.0;
  for (const auto& [c, n] : counts) norm += 1.0 / static_cast<double>(n);
  std::vector<std::pair<std::uint32_t, double>> out;
  for (const auto& [c, n] : counts) out.emplace_back(c, (1.0 / static_cast<double>(n)) / norm);
  return out;
}

std::vector<double> vertex_sampling_probs(std::span<const std::uint32_t> labels) {
  std::map<std::uint32_t, std::uint64_t> counts;
  for (auto c : labels) ++counts[c];
  const auto classes = static_cast<double>(counts.size());
  std::vector<double> p;
  p.reserve(labels.size());
  for (auto c : labels) p.push_back(1.0 / (classes * static_cast<double>(counts[c])));
  return p;
}

}  // namespace sumlife::learn
