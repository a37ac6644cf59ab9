#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "sumlife/features.hpp"

namespace sumlife::learn {

namespace {

bool considered(const rdf::SnapshotGraph& g, const rdf::OutEdge& e, bool include_rdf_type) {
  return include_rdf_type || !g.is_type_edge(e);
}

// Incrementally admits target closures and materializes the batch at the end.
class BatchAccumulator {
 public:
  BatchAccumulator(const rdf::SnapshotGraph& g, const BatchOptions& opts) : g_(g), opts_(opts) {}

  // Returns false (and changes nothing) when the closure does not fit.
  bool admit(VertexId target, std::uint32_t label) {
    closure(target);
    std::size_t fresh = 0;
    for (VertexId v : scratch_) fresh += members_.contains(v) ? 0 : 1;
    if (!draws_.empty() && members_.size() + fresh > opts_.cap) return false;
    for (VertexId v : scratch_) {
      if (members_.insert(v).second) order_.push_back(v);
    }
    draws_.emplace_back(target, label);
    return true;
  }

  std::size_t draws() const { return draws_.size(); }

  Subgraph finish(const FeatureMatrix& features) const {
    Subgraph b;
    b.hops = opts_.hops;
    std::unordered_map<VertexId, std::uint32_t> local;
    local.reserve(order_.size());
    auto place = [&](VertexId v) {
      if (local.emplace(v, static_cast<std::uint32_t>(b.vertices.size())).second) b.vertices.push_back(v);
    };
    for (const auto& d : draws_) place(d.first);
    for (VertexId v : order_) place(v);
    for (const auto& [v, label] : draws_) {
      b.targets.push_back(local.at(v));
      b.labels.push_back(label);
    }

    for (std::uint32_t i = 0; i < b.vertices.size(); ++i) {
      for (const auto& e : g_.out_edges(b.vertices[i])) {
        if (!considered(g_, e, opts_.include_rdf_type)) continue;
        const auto it = local.find(e.target);
        if (it == local.end()) continue;
        const auto col = features.column_of(e.predicate);
        if (!col) throw std::out_of_range("batch edge uses a predicate without a feature column");
        b.edges.push_back({i, *col, it->second});
      }
    }

    FeatureMatrix& f = b.features;
    f.width = std::min(features.width, opts_.feature_width);
    f.predicate_columns = features.predicate_columns;
    f.row_ptr.reserve(b.vertices.size() + 1);
    for (VertexId v : b.vertices) {
      for (auto c : features.row(v)) {
        if (c < f.width) f.cols.push_back(c);
      }
      f.row_ptr.push_back(f.cols.size());
    }
    return b;
  }

 private:
  // k-hop out-closure of v (v included) into scratch_, in BFS order.
  void closure(VertexId v) {
    scratch_.clear();
    seen_.clear();
    scratch_.push_back(v);
    seen_.insert(v);
    std::size_t begin = 0;
    for (int hop = 0; hop < opts_.hops; ++hop) {
      const std::size_t end = scratch_.size();
      for (std::size_t i = begin; i < end; ++i) {
        for (const auto& e : g_.out_edges(scratch_[i])) {
          if (!considered(g_, e, opts_.include_rdf_type)) continue;
          if (seen_.insert(e.target).second) scratch_.push_back(e.target);
        }
      }
      begin = end;
    }
  }

  const rdf::SnapshotGraph& g_;
  const BatchOptions& opts_;
  std::unordered_set<VertexId> members_;
  std::vector<VertexId> order_;
  std::vector<std::pair<VertexId, std::uint32_t>> draws_;
  std::vector<VertexId> scratch_;
  std::unordered_set<VertexId> seen_;
};

void check_options(const BatchOptions& opts) {
  if (opts.hops < 0 || opts.hops > 2) throw std::invalid_argument("batch hops must be 0, 1 or 2");
  if (opts.cap < 1) throw std::invalid_argument("batch cap must be >= 1");
}

}  // namespace

std::size_t build_batch(const rdf::SnapshotGraph& g, const FeatureMatrix& features,
                        std::span<const std::uint32_t> labels, std::span<const VertexId> targets,
                        const BatchOptions& opts, Subgraph& out) {
  check_options(opts);
  BatchAccumulator acc(g, opts);
  for (VertexId t : targets) {
    if (!acc.admit(t, labels[t])) break;
  }
  out = acc.finish(features);
  return acc.draws();
}

ClassBalancedSampler::ClassBalancedSampler(std::span<const std::uint32_t> labels, const Split& split) {
  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<std::uint32_t> classes;
  for (VertexId v = 0; v < labels.size(); ++v) {
    if (split.tags[v] == SplitTag::kTrain && !slot.contains(labels[v])) {
      slot.emplace(labels[v], 0);
      classes.push_back(labels[v]);
    }
  }
  std::sort(classes.begin(), classes.end());
  for (std::size_t i = 0; i < classes.size(); ++i) slot[classes[i]] = i;
  by_class_.resize(classes.size());
  for (VertexId v = 0; v < labels.size(); ++v) {
    if (split.tags[v] == SplitTag::kTrain) by_class_[slot[labels[v]]].push_back(v);
  }
}

VertexId ClassBalancedSampler::draw(Rng& rng) const {
  if (by_class_.empty()) throw std::invalid_argument("cannot sample from an empty train split");
  const auto& members = by_class_[rng.below(by_class_.size())];
  return members[rng.below(members.size())];
}

Subgraph sample_batch(const rdf::SnapshotGraph& g, const FeatureMatrix& features,
                      std::span<const std::uint32_t> labels, const ClassBalancedSampler& sampler,
                      const BatchOptions& opts, Rng& rng) {
  check_options(opts);
  if (sampler.class_count() == 0) throw std::invalid_argument("cannot sample from an empty train split");
  BatchAccumulator acc(g, opts);
  for (std::size_t i = 0; i < opts.cap; ++i) {
    const VertexId t = sampler.draw(rng);
    if (!acc.admit(t, labels[t])) break;
  }
  return acc.finish(features);
}

Subgraph edge_as_vertex_transform(const Subgraph& b) {
  if (b.hops != 2) throw std::invalid_argument("edge-as-vertex transform needs a 2-hop batch");
  if (b.edge_as_vertex) throw std::invalid_argument("batch is already transformed");
  Subgraph out;
  out.hops = b.hops;
  out.edge_as_vertex = true;
  out.vertices = b.vertices;
  out.targets = b.targets;
  out.labels = b.labels;
  out.features = b.features;
  const auto n = static_cast<std::uint32_t>(b.vertices.size());
  out.vertices.reserve(b.vertices.size() + b.edges.size());
  out.edges.reserve(2 * b.edges.size());
  for (std::size_t i = 0; i < b.edges.size(); ++i) {
    const auto& e = b.edges[i];
    const auto ev = n + static_cast<std::uint32_t>(i);
    out.vertices.push_back(kNoVertex);
    out.edges.push_back({e.source, e.predicate, ev});
    out.edges.push_back({ev, e.predicate, e.target});
    if (e.predicate < out.features.width) out.features.cols.push_back(e.predicate);
    out.features.row_ptr.push_back(out.features.cols.size());
  }
  return out;
}

}  // namespace sumlife::learn
