#include <cstdio>
#include <memory>
#include <stdexcept>

#include "sumlife/rng.hpp"
#include "sumlife/synth.hpp"

namespace sumlife::synth {

std::vector<Pattern> binary_patterns(std::size_t count, const std::string& prefix) {
  std::vector<Pattern> out;
  for (std::size_t k = 0; k < count; ++k) {
    Pattern p;
    const std::size_t bits = k + 1;
    for (std::size_t b = 0; (bits >> b) != 0; ++b) {
      if ((bits >> b) & 1U) p.push_back(prefix + "p" + std::to_string(b));
    }
    out.push_back(std::move(p));
  }
  return out;
}

rdf::SnapshotGraph pattern_graph(const PatternGraphSpec& spec, std::string timestamp) {
  if (spec.patterns.empty()) throw std::invalid_argument("pattern_graph needs at least one pattern");
  if (spec.vertices < spec.patterns.size()) throw std::invalid_argument("pattern_graph needs a vertex per pattern");
  auto terms = std::make_shared<rdf::TermTable>();
  rdf::GraphBuilder b(std::move(timestamp), terms);
  Rng rng(spec.seed);
  std::vector<TermId> vertex(spec.vertices);
  for (std::size_t i = 0; i < spec.vertices; ++i) {
    vertex[i] = terms->intern(rdf::TermKind::kIri, spec.vertex_prefix + std::to_string(i));
    b.add_vertex(vertex[i]);
  }
  std::size_t literal = 0;
  for (std::size_t i = 0; i < spec.vertices; ++i) {
    const std::size_t k = i < spec.patterns.size() ? i : rng.below(spec.patterns.size());
    for (const auto& iri : spec.patterns[k]) {
      const TermId p = terms->intern(rdf::TermKind::kIri, iri);
      const std::size_t fanout = 1 + rng.below(2);
      for (std::size_t e = 0; e < fanout; ++e) {
        TermId o;
        if (spec.literal_objects) {
          o = terms->intern(rdf::TermKind::kLiteral, "\"" + std::to_string(literal++) + "\"");
        } else {
          o = vertex[rng.below(spec.vertices)];
        }
        b.add_edge(vertex[i], p, o);
      }
    }
  }
  return std::move(b).finish();
}

std::string task_timestamp(std::size_t t) {
  if (t >= 28) throw std::invalid_argument("task_timestamp supports up to 28 tasks");
  char buf[16];
  std::snprintf(buf, sizeof(buf), "2024-01-%02zu", t + 1);
  return buf;
}

std::vector<rdf::SnapshotGraph> drift_sequence(const DriftSpec& spec) {
  std::vector<rdf::SnapshotGraph> out;
  const auto shared = binary_patterns(spec.shared_classes, "http://example.org/shared/");
  for (std::size_t t = 0; t < spec.tasks; ++t) {
    PatternGraphSpec g;
    g.vertices = spec.vertices;
    g.patterns = shared;
    for (auto& p : binary_patterns(spec.unique_classes, "http://example.org/task" + std::to_string(t) + "/")) {
      g.patterns.push_back(std::move(p));
    }
    g.seed = derive_seed(spec.seed, t);
    out.push_back(pattern_graph(g, task_timestamp(t)));
  }
  return out;
}

std::vector<rdf::SnapshotGraph> disjoint_pair(std::size_t vertices, std::size_t classes, std::uint64_t seed) {
  DriftSpec d;
  d.tasks = 2;
  d.vertices = vertices;
  d.shared_classes = 0;
  d.unique_classes = classes;
  d.seed = seed;
  return drift_sequence(d);
}

rdf::SnapshotGraph random_graph(const RandomGraphSpec& spec, std::string timestamp) {
  if (spec.vertices == 0 || spec.predicates == 0) throw std::invalid_argument("random_graph needs vertices and predicates");
  auto terms = std::make_shared<rdf::TermTable>();
  rdf::GraphBuilder b(std::move(timestamp), terms);
  Rng rng(spec.seed);
  std::vector<TermId> vertex(spec.vertices);
  for (std::size_t i = 0; i < spec.vertices; ++i) {
    vertex[i] = terms->intern(rdf::TermKind::kIri, "http://example.org/r/" + std::to_string(i));
  }
  std::vector<TermId> preds(spec.predicates);
  for (std::size_t i = 0; i < spec.predicates; ++i) {
    preds[i] = terms->intern(rdf::TermKind::kIri, "http://example.org/rp/" + std::to_string(i));
  }
  for (std::size_t e = 0; e < spec.edges; ++e) {
    const TermId s = vertex[rng.below(spec.vertices)];
    const TermId p = preds[rng.below(spec.predicates)];
    TermId o;
    if (spec.literal_fraction > 0.0 && rng.uniform01() < spec.literal_fraction) {
      o = terms->intern(rdf::TermKind::kLiteral, "\"l" + std::to_string(e) + "\"");
    } else {
      o = vertex[rng.below(spec.vertices)];
    }
    b.add_edge(s, p, o);
  }
  return std::move(b).finish();
}

}  // namespace sumlife::synth
