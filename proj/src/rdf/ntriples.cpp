#include <cctype>
#include <optional>

#include "sumlife/rdf.hpp"

namespace sumlife::rdf {

namespace {

struct RawTerm {
  TermKind kind;
  std::string_view text;  // lexical form as it will be interned
};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  std::size_t pos() const { return pos_; }
  void advance(std::size_t n = 1) { pos_ += n; }
  std::string_view slice(std::size_t from) const { return s_.substr(from, pos_ - from); }
  bool starts_with(std::string_view p) const { return s_.substr(pos_).starts_with(p); }

  void skip_ws() {
    while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

// Consumes \uXXXX or \UXXXXXXXX after the backslash has been seen.
bool consume_uchar(Cursor& c) {
  const char kind = c.peek();
  const int digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
  if (digits == 0) return false;
  c.advance();
  for (int i = 0; i < digits; ++i) {
    if (!is_hex(c.peek())) return false;
    c.advance();
  }
  return true;
}

std::optional<std::string_view> parse_iri(Cursor& c) {
  if (c.peek() != '<') return std::nullopt;
  c.advance();
  const std::size_t start = c.pos();
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == '>') {
      std::string_view iri = c.slice(start);
      c.advance();
      if (iri.empty()) return std::nullopt;
      return iri;
    }
    if (static_cast<unsigned char>(ch) <= 0x20 || ch == '<' || ch == '"' || ch == '{' ||
        ch == '}' || ch == '|' || ch == '^' || ch == '`') {
      return std::nullopt;
    }
    if (ch == '\\') {
      c.advance();
      if (!consume_uchar(c)) return std::nullopt;
      continue;
    }
    c.advance();
  }
  return std::nullopt;
}

bool is_label_char(char ch) {
  const auto u = static_cast<unsigned char>(ch);
  return std::isalnum(u) || ch == '_' || ch == '-' || ch == '.' || ch == ':' || u >= 0x80;
}

std::optional<std::string_view> parse_blank(Cursor& c) {
  if (!c.starts_with("_:")) return std::nullopt;
  const std::size_t start = c.pos();
  c.advance(2);
  const std::size_t label_start = c.pos();
  std::size_t end = label_start;
  // A label may contain '.', but never ends with one.
  Cursor probe = c;
  while (!probe.done() && is_label_char(probe.peek())) {
    const bool dot = probe.peek() == '.';
    probe.advance();
    if (!dot) end = probe.pos();
  }
  if (end == label_start) return std::nullopt;
  c.advance(end - label_start);
  return c.slice(start);
}

bool parse_langtag(Cursor& c) {
  // '@' [a-zA-Z]+ ('-' [a-zA-Z0-9]+)*
  c.advance();
  std::size_t n = 0;
  while (std::isalpha(static_cast<unsigned char>(c.peek()))) {
    c.advance();
    ++n;
  }
  if (n == 0) return false;
  while (c.peek() == '-') {
    c.advance();
    n = 0;
    while (std::isalnum(static_cast<unsigned char>(c.peek()))) {
      c.advance();
      ++n;
    }
    if (n == 0) return false;
  }
  return true;
}

std::optional<std::string_view> parse_literal(Cursor& c) {
  if (c.peek() != '"') return std::nullopt;
  const std::size_t start = c.pos();
  c.advance();
  bool closed = false;
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == '"') {
      c.advance();
      closed = true;
      break;
    }
    if (ch == '\n' || ch == '\r') return std::nullopt;
    if (ch == '\\') {
      c.advance();
      const char e = c.peek();
      if (e == 't' || e == 'b' || e == 'n' || e == 'r' || e == 'f' || e == '"' || e == '\'' ||
          e == '\\') {
        c.advance();
        continue;
      }
      if (!consume_uchar(c)) return std::nullopt;
      continue;
    }
    c.advance();
  }
  if (!closed) return std::nullopt;
  if (c.starts_with("^^")) {
    c.advance(2);
    if (!parse_iri(c)) return std::nullopt;
  } else if (c.peek() == '@') {
    if (!parse_langtag(c)) return std::nullopt;
  }
  return c.slice(start);
}

std::optional<RawTerm> parse_subject(Cursor& c) {
  if (auto iri = parse_iri(c)) return RawTerm{TermKind::kIri, *iri};
  if (auto b = parse_blank(c)) return RawTerm{TermKind::kBlank, *b};
  return std::nullopt;
}

std::optional<RawTerm> parse_object(Cursor& c) {
  if (auto t = parse_subject(c)) return t;
  if (auto lit = parse_literal(c)) return RawTerm{TermKind::kLiteral, *lit};
  return std::nullopt;
}

Skip malformed(std::string detail) { return Skip{SkipReason::kMalformed, std::move(detail)}; }

TermId intern_term(TermTable& table, const RawTerm& t, std::string_view blank_scope) {
  if (t.kind == TermKind::kBlank && !blank_scope.empty()) {
    std::string scoped = "_:";
    scoped.append(blank_scope);
    scoped.append(t.text.substr(2));
    return table.intern(TermKind::kBlank, scoped);
  }
  return table.intern(t.kind, t.text);
}

}  // namespace

ParseResult parse_line(std::string_view line, TermTable& table, std::string_view blank_scope) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  Cursor c(line);
  c.skip_ws();
  if (c.done()) return Skip{SkipReason::kBlank, {}};
  if (c.peek() == '#') return Skip{SkipReason::kComment, {}};

  const auto subject = parse_subject(c);
  if (!subject) return malformed("bad subject");
  c.skip_ws();
  const auto predicate = parse_iri(c);
  if (!predicate) return malformed("bad predicate");
  c.skip_ws();
  const auto object = parse_object(c);
  if (!object) return malformed("bad object");
  c.skip_ws();
  if (c.peek() != '.') {
    // Optional graph label of an N-Quads statement.
    if (!parse_subject(c)) return malformed("expected '.' or graph label");
    c.skip_ws();
    if (c.peek() != '.') return malformed("expected '.'");
  }
  c.advance();
  c.skip_ws();
  if (!c.done() && c.peek() != '#') return malformed("trailing content");

  Triple t;
  t.subject = intern_term(table, *subject, blank_scope);
  t.predicate = table.intern(TermKind::kIri, *predicate);
  t.object = intern_term(table, *object, blank_scope);
  return t;
}

}  // namespace sumlife::rdf
