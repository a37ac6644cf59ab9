#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <string>

#include "sumlife/rdf.hpp"

namespace sumlife::rdf {

std::optional<VertexId> SnapshotGraph::vertex_of(TermId t) const {
  if (t >= term_vertex_.size() || term_vertex_[t] == kNoVertex) return std::nullopt;
  return term_vertex_[t];
}

std::optional<VertexId> SnapshotGraph::find_vertex(std::string_view iri) const {
  const auto t = terms_->find(TermKind::kIri, iri);
  if (!t) return std::nullopt;
  return vertex_of(*t);
}

std::vector<std::size_t> SnapshotGraph::in_degrees() const {
  std::vector<std::size_t> deg(vertex_count(), 0);
  for (const auto& e : edges_) ++deg[e.target];
  return deg;
}

GraphBuilder::GraphBuilder(std::string timestamp, std::shared_ptr<TermTable> terms)
    : timestamp_(std::move(timestamp)), terms_(std::move(terms)) {
  if (!terms_) terms_ = std::make_shared<TermTable>();
}

VertexId GraphBuilder::add_vertex(TermId term) {
  if (term >= term_vertex_.size()) term_vertex_.resize(std::max<std::size_t>(term + 1, terms_->size()), kNoVertex);
  VertexId& slot = term_vertex_[term];
  if (slot == kNoVertex) {
    slot = static_cast<VertexId>(vertex_terms_.size());
    vertex_terms_.push_back(term);
  }
  return slot;
}

void GraphBuilder::add_edge(TermId subject, TermId predicate, TermId object) {
  const VertexId s = add_vertex(subject);
  const VertexId o = add_vertex(object);
  edges_.push_back(RawEdge{s, predicate, o});
}

SnapshotGraph GraphBuilder::finish() && {
  std::sort(edges_.begin(), edges_.end());
  const auto last = std::unique(edges_.begin(), edges_.end());
  stats_.duplicates += static_cast<std::uint64_t>(edges_.end() - last);
  edges_.erase(last, edges_.end());

  SnapshotGraph g;
  g.timestamp_ = std::move(timestamp_);
  const std::size_t n = vertex_terms_.size();
  g.offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) ++g.offsets_[e.source + 1];
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.edges_.reserve(edges_.size());
  // edges_ is sorted by source first, so this fills the CSR in order.
  std::vector<TermId> preds;
  preds.reserve(64);
  for (const auto& e : edges_) {
    g.edges_.push_back(OutEdge{e.predicate, e.target});
    preds.push_back(e.predicate);
  }
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  g.predicates_ = std::move(preds);
  g.rdf_type_ = terms_->find(TermKind::kIri, kRdfType);
  g.vertex_terms_ = std::move(vertex_terms_);
  term_vertex_.resize(terms_->size(), kNoVertex);
  g.term_vertex_ = std::move(term_vertex_);
  g.terms_ = std::move(terms_);
  g.stats_ = stats_;
  edges_.clear();
  return g;
}

namespace {

void consume_line(std::string_view line, GraphBuilder& builder, std::string_view scope) {
  auto& stats = builder.stats();
  ++stats.lines;
  const ParseResult r = parse_line(line, builder.terms(), scope);
  if (const auto* t = std::get_if<Triple>(&r)) {
    ++stats.statements;
    builder.add_triple(*t);
    return;
  }
  switch (std::get<Skip>(r).reason) {
    case SkipReason::kBlank:
      ++stats.blank;
      break;
    case SkipReason::kComment:
      ++stats.comments;
      break;
    case SkipReason::kMalformed:
      ++stats.malformed;
      break;
  }
}

void consume_text(std::string_view text, GraphBuilder& builder, std::string_view scope) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
      consume_line(text, builder, scope);
      break;
    }
    consume_line(text.substr(0, nl), builder, scope);
    text.remove_prefix(nl + 1);
  }
}

void read_file(const std::filesystem::path& file, GraphBuilder& builder, std::string_view scope) {
  // gzopen reads uncompressed files transparently, so one path serves both.
  gzFile in = gzopen(file.string().c_str(), "rb");
  if (in == nullptr) throw IoError("cannot open " + file.string() + " at byte offset 0");
  gzbuffer(in, 1 << 17);
  std::string buffer(1 << 20, '\0');
  std::string carry;
  std::uint64_t offset = 0;
  for (;;) {
    const int got = gzread(in, buffer.data(), static_cast<unsigned>(buffer.size()));
    if (got < 0) {
      int code = 0;
      const char* msg = gzerror(in, &code);
      const std::string what = "read error in " + file.string() + " at byte offset " +
                               std::to_string(offset) + ": " + (msg ? msg : "unknown");
      gzclose(in);
      throw IoError(what);
    }
    if (got == 0) break;
    std::string_view chunk(buffer.data(), static_cast<std::size_t>(got));
    offset += static_cast<std::uint64_t>(got);
    const auto last_nl = chunk.rfind('\n');
    if (last_nl == std::string_view::npos) {
      carry.append(chunk);
      continue;
    }
    if (!carry.empty()) {
      const auto first_nl = chunk.find('\n');
      carry.append(chunk.substr(0, first_nl));
      consume_line(carry, builder, scope);
      carry.clear();
      chunk.remove_prefix(first_nl + 1);
      consume_text(chunk.substr(0, chunk.rfind('\n') + 1), builder, scope);
    } else {
      consume_text(chunk.substr(0, last_nl + 1), builder, scope);
    }
    carry.assign(chunk.substr(chunk.rfind('\n') + 1));
  }
  gzclose(in);
  if (!carry.empty()) consume_line(carry, builder, scope);
}

}  // namespace

SnapshotGraph load_snapshot(const std::filesystem::path& path, std::string timestamp) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(path, ec)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + path.string() + " at byte offset 0: " + ec.message());
    std::sort(files.begin(), files.end());
  } else if (std::filesystem::exists(path, ec)) {
    files.push_back(path);
  } else {
    throw IoError("cannot open " + path.string() + " at byte offset 0: no such file");
  }

  GraphBuilder builder(std::move(timestamp), std::make_shared<TermTable>());
  for (std::size_t i = 0; i < files.size(); ++i) {
    // Blank labels are document scoped: the first document keeps its labels,
    // later ones get a per-file prefix.
    const std::string scope = i == 0 ? std::string() : "f" + std::to_string(i) + ".";
    read_file(files[i], builder, scope);
  }
  return std::move(builder).finish();
}

SnapshotGraph load_snapshot_text(std::string_view text, std::string timestamp) {
  GraphBuilder builder(std::move(timestamp), std::make_shared<TermTable>());
  consume_text(text, builder, {});
  return std::move(builder).finish();
}

SnapshotGraph filter_high_degree(const SnapshotGraph& g, std::size_t cap, DegreeMode mode) {
  if (cap == 0) throw ConfigError("degree cap must be >= 1");
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> degree(n, 0);
  if (mode != DegreeMode::kOut) degree = g.in_degrees();
  if (mode != DegreeMode::kIn) {
    for (VertexId v = 0; v < n; ++v) degree[v] += g.out_degree(v);
  }
  std::vector<bool> keep(n);
  for (VertexId v = 0; v < n; ++v) keep[v] = degree[v] <= cap;

  // The term table is shared; builder only appends, and every term it sees
  // already exists, so the shared table is never mutated.
  auto terms = std::const_pointer_cast<TermTable>(g.terms_ptr());
  GraphBuilder builder(g.timestamp(), terms);
  for (VertexId v = 0; v < n; ++v) {
    if (keep[v]) builder.add_vertex(g.vertex_term(v));
  }
  for (VertexId v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    for (const auto& e : g.out_edges(v)) {
      if (keep[e.target]) builder.add_edge(g.vertex_term(v), e.predicate, g.vertex_term(e.target));
    }
  }
  builder.stats() = g.stats();
  return std::move(builder).finish();
}

void write_ntriples(const SnapshotGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string() + " at byte offset 0");
  const auto& terms = g.terms();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const std::string subject = terms.to_ntriples(g.vertex_term(v));
    for (const auto& e : g.out_edges(v)) {
      out << subject << ' ' << terms.to_ntriples(e.predicate) << ' '
          << terms.to_ntriples(g.vertex_term(e.target)) << " .\n";
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sumlife::rdf
