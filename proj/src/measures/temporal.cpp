#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <stdexcept>

#include "sumlife/measures.hpp"

namespace sumlife::measures {

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

namespace {

Histogram to_histogram(const std::vector<std::uint64_t>& values) {
  std::map<std::uint64_t, std::uint64_t, std::greater<>> freq;
  for (auto v : values) ++freq[v];
  return Histogram(freq.begin(), freq.end());
}

std::size_t intersection_size(const std::vector<EqcHash>& a, const std::vector<EqcHash>& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

// D(A,B) restricted to q in C_B.
double directed_divergence(const Summary& a, const Summary& b, JsNormalization norm) {
  auto denom = [norm](const Summary& s) {
    return norm == JsNormalization::kExtensionMass ? static_cast<double>(s.ext.total())
                                                   : static_cast<double>(s.graph.eqcs.size());
  };
  const double na = denom(a);
  const double nb = denom(b);
  std::vector<double> terms;
  terms.reserve(b.graph.eqcs.size());
  for (std::size_t j = 0; j < b.graph.eqcs.size(); ++j) {
    const auto i = a.graph.index_of(b.graph.eqcs[j]);
    if (i < 0) continue;
    const double pa = static_cast<double>(a.ext.sizes[static_cast<std::size_t>(i)]) / na;
    const double pb = static_cast<double>(b.ext.sizes[j]) / nb;
    if (pa == 0.0 || pb == 0.0) continue;
    terms.push_back(pa * std::log2(pa / pb));
  }
  return kahan_sum(terms);
}

}  // namespace

SummaryStats unary_stats(const SummaryGraph& s, const ExtensionMap& ext) {
  if (s.eqcs.empty()) throw std::domain_error("unary_stats on an empty summary");
  SummaryStats out;
  const auto c = static_cast<double>(s.eqcs.size());
  out.avg_size = static_cast<double>(ext.total()) / c;
  out.avg_edges = static_cast<double>(s.edges.size()) / c;

  std::vector<std::uint64_t> attrs(s.eqcs.size(), 0);
  for (const auto& e : s.edges) {
    const auto i = s.index_of(e.source);
    if (i >= 0) ++attrs[static_cast<std::size_t>(i)];
  }
  out.dist_attrs_per_eqc = to_histogram(attrs);
  out.dist_members_per_eqc = to_histogram(ext.sizes);
  out.dist_predicate_usage = to_histogram(s.predicate_usage);
  return out;
}

double jaccard_dist(const SummaryGraph& a, const SummaryGraph& b) {
  const std::size_t inter = intersection_size(a.eqcs, b.eqcs);
  const std::size_t uni = a.eqcs.size() + b.eqcs.size() - inter;
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double js_divergence(const Summary& a, const Summary& b, JsNormalization norm) {
  if (a.graph.eqcs.empty() || b.graph.eqcs.empty()) return 0.0;
  return directed_divergence(a, b, norm) + directed_divergence(b, a, norm);
}

DiffReport diff(const Summary& prev, const Summary& next, JsNormalization norm) {
  if (prev.graph.model != next.graph.model) {
    throw ConfigError("cannot compare summaries of different models (" +
                      std::string(summary::to_string(prev.graph.model)) + " vs " +
                      std::string(summary::to_string(next.graph.model)) + ")");
  }
  DiffReport r;
  r.jaccard = jaccard_dist(prev.graph, next.graph);
  r.js_divergence = js_divergence(prev, next, norm);
  r.recurring = intersection_size(prev.graph.eqcs, next.graph.eqcs);
  r.added = next.graph.eqcs.size() - r.recurring;
  r.deleted = prev.graph.eqcs.size() - r.recurring;
  return r;
}

MetaTrack meta_track(std::span<const SummaryGraph* const> seq) {
  if (seq.empty()) throw std::invalid_argument("meta_track needs at least one summary");
  MetaTrack track;
  std::vector<EqcHash> seen;        // ∪ of all snapshots before t-1
  std::vector<EqcHash> seen_total;  // ∪ of all snapshots up to t
  const auto& first = seq.front()->eqcs;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& cur = seq[t]->eqcs;
    MetaTrackEntry e;
    e.eqcs = cur.size();
    if (t == 0) {
      e.added_vs_prev = cur.size();
    } else {
      const auto& prev = seq[t - 1]->eqcs;
      e.recurring_vs_prev = intersection_size(prev, cur);
      e.added_vs_prev = cur.size() - e.recurring_vs_prev;
      e.deleted_vs_prev = prev.size() - e.recurring_vs_prev;
      for (const auto& h : cur) {
        if (!std::binary_search(prev.begin(), prev.end(), h) &&
            std::binary_search(seen.begin(), seen.end(), h)) {
          e.reappeared.push_back(h);
        }
      }
      e.reappearing = e.reappeared.size();
    }
    e.new_vs_first = cur.size() - intersection_size(first, cur);

    std::vector<EqcHash> merged;
    std::set_union(seen_total.begin(), seen_total.end(), cur.begin(), cur.end(),
                   std::back_inserter(merged));
    // `seen` lags one snapshot behind so that it excludes t-1 when used at t.
    if (t > 0) {
      std::vector<EqcHash> lag;
      const auto& prev = seq[t - 1]->eqcs;
      std::set_union(seen.begin(), seen.end(), prev.begin(), prev.end(), std::back_inserter(lag));
      seen = std::move(lag);
    }
    seen_total = std::move(merged);
    e.cumulative_seen = seen_total.size();
    track.entries.push_back(std::move(e));
  }
  return track;
}

MetaTrack meta_track(std::span<const Summary> seq) {
  std::vector<const SummaryGraph*> ptrs;
  ptrs.reserve(seq.size());
  for (const auto& s : seq) ptrs.push_back(&s.graph);
  return meta_track(std::span<const SummaryGraph* const>(ptrs));
}

}  // namespace sumlife::measures
