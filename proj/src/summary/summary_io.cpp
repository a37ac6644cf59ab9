#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "sumlife/summarizer.hpp"

namespace sumlife::summary {

namespace {

std::string vertex_label(const rdf::TermTable& terms, TermId t) {
  std::string s = terms.kind(t) == rdf::TermKind::kIri ? std::string(terms.lexical(t))
                                                        : terms.to_ntriples(t);
  // Keep the TSV two-column even for literals carrying raw tabs.
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\t') out += "\\t";
    else out += c;
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cols;
}

}  // namespace

void write_eqcs_tsv(const rdf::SnapshotGraph& g, const Summary& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    out << vertex_label(g.terms(), g.vertex_term(v)) << '\t' << to_hex(s.ext.vertex_eqc[v]) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_summary_tsv(const SummaryGraph& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : s.edges) {
    out << to_hex(e.source) << '\t' << s.predicates[e.predicate] << '\t' << to_hex(e.child) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Summary read_summary_tsv(const std::filesystem::path& eqcs_tsv,
                         const std::filesystem::path& summary_tsv, SummaryModel model,
                         std::string timestamp) {
  Summary out;
  out.graph.model = model;
  out.graph.timestamp = std::move(timestamp);

  std::ifstream in(eqcs_tsv, std::ios::binary);
  if (!in) throw IoError("cannot open " + eqcs_tsv.string() + " at byte offset 0");
  std::map<EqcHash, std::uint64_t> sizes;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const auto cols = split_tabs(line);
    if (cols.size() != 2) {
      throw IoError("malformed line in " + eqcs_tsv.string() + " at byte offset " + std::to_string(offset));
    }
    const EqcHash h = parse_hex(cols[1]);
    out.ext.vertex_eqc.push_back(h);
    ++sizes[h];
    offset += line.size() + 1;
  }
  for (const auto& [h, n] : sizes) {
    out.graph.eqcs.push_back(h);
    out.ext.sizes.push_back(n);
  }

  std::ifstream sin(summary_tsv, std::ios::binary);
  if (!sin) throw IoError("cannot open " + summary_tsv.string() + " at byte offset 0");
  std::vector<std::tuple<EqcHash, std::string, EqcHash>> raw;
  offset = 0;
  while (std::getline(sin, line)) {
    const auto cols = split_tabs(line);
    if (cols.size() != 3) {
      throw IoError("malformed line in " + summary_tsv.string() + " at byte offset " + std::to_string(offset));
    }
    raw.emplace_back(parse_hex(cols[0]), std::string(cols[1]), parse_hex(cols[2]));
    offset += line.size() + 1;
  }
  for (const auto& r : raw) out.graph.predicates.push_back(std::get<1>(r));
  std::sort(out.graph.predicates.begin(), out.graph.predicates.end());
  out.graph.predicates.erase(std::unique(out.graph.predicates.begin(), out.graph.predicates.end()),
                             out.graph.predicates.end());
  for (const auto& [src, p, child] : raw) {
    const auto idx = static_cast<std::uint32_t>(
        std::lower_bound(out.graph.predicates.begin(), out.graph.predicates.end(), p) -
        out.graph.predicates.begin());
    out.graph.edges.push_back(SummaryEdge{src, idx, child});
    out.graph.secondary.push_back(SecondaryVertex{idx, child});
  }
  std::sort(out.graph.edges.begin(), out.graph.edges.end());
  out.graph.edges.erase(std::unique(out.graph.edges.begin(), out.graph.edges.end()), out.graph.edges.end());
  std::sort(out.graph.secondary.begin(), out.graph.secondary.end());
  out.graph.secondary.erase(std::unique(out.graph.secondary.begin(), out.graph.secondary.end()),
                            out.graph.secondary.end());
  return out;
}

}  // namespace sumlife::summary
