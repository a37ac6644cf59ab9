#include "sumlife/rdf.hpp"

namespace sumlife::rdf {

namespace {

std::string make_key(TermKind kind, std::string_view lexical) {
  std::string key;
  key.reserve(lexical.size() + 1);
  key.push_back(static_cast<char>(kind));
  key.append(lexical);
  return key;
}

}  // namespace

TermId TermTable::intern(TermKind kind, std::string_view lexical) {
  std::string key = make_key(kind, lexical);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  if (keys_.size() >= kNoTerm) throw Error("term table overflow");
  const auto id = static_cast<TermId>(keys_.size());
  keys_.push_back(std::move(key));
  index_.emplace(std::string_view(keys_.back()), id);
  return id;
}

std::optional<TermId> TermTable::find(TermKind kind, std::string_view lexical) const {
  const std::string key = make_key(kind, lexical);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

std::string TermTable::to_ntriples(TermId id) const {
  switch (kind(id)) {
    case TermKind::kIri:
      return "<" + std::string(lexical(id)) + ">";
    case TermKind::kBlank:
    case TermKind::kLiteral:
      return std::string(lexical(id));
  }
  return {};
}

}  // namespace sumlife::rdf
