#include <algorithm>
#include <fstream>

#include "sumlife/features.hpp"

namespace sumlife::learn {

std::optional<std::uint32_t> PredicateVocabulary::find(std::string_view iri) const {
  const auto it = index_.find(std::string(iri));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PredicateVocabulary::extend(std::span<const std::string> iris) {
  std::vector<std::string> fresh;
  for (const auto& iri : iris) {
    if (!index_.contains(iri)) fresh.push_back(iri);
  }
  std::sort(fresh.begin(), fresh.end());
  fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
  for (auto& iri : fresh) {
    index_.emplace(iri, static_cast<std::uint32_t>(entries_.size()));
    entries_.push_back(std::move(iri));
  }
  return fresh.size();
}

std::size_t PredicateVocabulary::extend(const rdf::SnapshotGraph& g, bool include_rdf_type) {
  std::vector<std::string> iris;
  for (TermId p : g.predicates()) {
    if (!include_rdf_type && g.rdf_type() && p == *g.rdf_type()) continue;
    iris.emplace_back(g.terms().lexical(p));
  }
  return extend(iris);
}

void PredicateVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : entries_) out << e << '\n';
}

PredicateVocabulary PredicateVocabulary::from_entries(std::vector<std::string> entries) {
  PredicateVocabulary v;
  for (auto& e : entries) {
    if (!v.index_.emplace(e, static_cast<std::uint32_t>(v.entries_.size())).second) {
      throw IoError("duplicate vocabulary entry " + e);
    }
    v.entries_.push_back(std::move(e));
  }
  return v;
}

PredicateVocabulary PredicateVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " at byte offset 0");
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) entries.push_back(line);
  }
  return from_entries(std::move(entries));
}

std::optional<std::uint32_t> ClassVocabulary::find(EqcHash h) const {
  const auto it = index_.find(h);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ClassVocabulary::extend(std::span<const EqcHash> hashes) {
  std::vector<EqcHash> fresh;
  for (const auto& h : hashes) {
    if (!index_.contains(h)) fresh.push_back(h);
  }
  std::sort(fresh.begin(), fresh.end());
  fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
  for (const auto& h : fresh) {
    index_.emplace(h, static_cast<std::uint32_t>(entries_.size()));
    entries_.push_back(h);
  }
  return fresh.size();
}

std::size_t ClassVocabulary::extend(const summary::SummaryGraph& s) { return extend(s.eqcs); }

void ClassVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : entries_) out << summary::to_hex(e) << '\n';
}

ClassVocabulary ClassVocabulary::from_entries(std::vector<EqcHash> entries) {
  ClassVocabulary v;
  for (const auto& h : entries) {
    if (!v.index_.emplace(h, static_cast<std::uint32_t>(v.entries_.size())).second) {
      throw IoError("duplicate vocabulary entry " + summary::to_hex(h));
    }
    v.entries_.push_back(h);
  }
  return v;
}

ClassVocabulary ClassVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " at byte offset 0");
  std::vector<EqcHash> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) entries.push_back(summary::parse_hex(line));
  }
  return from_entries(std::move(entries));
}

VocabularyGrowth extend_vocabularies(const rdf::SnapshotGraph& g, const summary::SummaryGraph& s,
                                     PredicateVocabulary& predicates, ClassVocabulary& classes,
                                     bool include_rdf_type) {
  VocabularyGrowth growth;
  growth.new_predicates = predicates.extend(g, include_rdf_type);
  growth.new_classes = classes.extend(s);
  return growth;
}

}  // namespace sumlife::learn
