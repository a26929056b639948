#include "rsr/rdf.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace rsr {

Term Term::iri(std::string text) {
  Term t;
  t.kind = Kind::Iri;
  t.text = std::move(text);
  return t;
}

Term Term::blank(std::string label) {
  Term t;
  t.kind = Kind::Blank;
  t.text = std::move(label);
  return t;
}

Term Term::literal(std::string lexical, std::string datatype, std::string lang) {
  Term t;
  t.kind = Kind::Literal;
  t.text = std::move(lexical);
  t.datatype = std::move(datatype);
  t.lang = std::move(lang);
  return t;
}

size_t TermHash::operator()(const Term& t) const noexcept {
  size_t h = std::hash<std::string>{}(t.text);
  h ^= static_cast<size_t>(t.kind) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  if (!t.datatype.empty())
    h ^= std::hash<std::string>{}(t.datatype) + (h << 6) + (h >> 2);
  if (!t.lang.empty())
    h ^= std::hash<std::string>{}(t.lang) + (h << 6) + (h >> 2);
  return h;
}

MalformedLine::MalformedLine(size_t line, const std::string& reason)
    : DataError("line " + std::to_string(line) + ": " + reason), line(line) {}

namespace {

struct LineScanner {
  const std::string& s;
  size_t pos = 0;
  size_t line;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw MalformedLine(line, reason);
  }

  std::string unescape(const std::string& raw) const {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '\\') {
        out.push_back(raw[i]);
        continue;
      }
      if (i + 1 >= raw.size()) fail("dangling escape in literal");
      switch (raw[++i]) {
        case 't': out.push_back('\t'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail("unsupported escape in literal");
      }
    }
    return out;
  }

  Term next_term(const char* position_name) {
    skip_ws();
    if (pos >= s.size()) fail(std::string("expected ") + position_name);
    char c = s[pos];
    if (c == '<') {
      size_t end = s.find('>', pos + 1);
      if (end == std::string::npos) fail("unterminated IRI");
      std::string iri = s.substr(pos + 1, end - pos - 1);
      if (iri.empty()) fail("empty IRI");
      for (char ch : iri)
        if (std::isspace(static_cast<unsigned char>(ch))) fail("whitespace in IRI");
      pos = end + 1;
      return Term::iri(std::move(iri));
    }
    if (c == '_') {
      if (pos + 1 >= s.size() || s[pos + 1] != ':') fail("malformed blank node");
      size_t start = pos + 2;
      size_t end = start;
      while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])))
        ++end;
      if (end == start) fail("empty blank node label");
      std::string label = s.substr(start, end - start);
      pos = end;
      return Term::blank(std::move(label));
    }
    if (c == '"') {
      size_t i = pos + 1;
      std::string raw;
      bool closed = false;
      while (i < s.size()) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          raw.push_back(s[i]);
          raw.push_back(s[i + 1]);
          i += 2;
          continue;
        }
        if (s[i] == '"') {
          closed = true;
          break;
        }
        raw.push_back(s[i]);
        ++i;
      }
      if (!closed) fail("unterminated literal");
      pos = i + 1;
      std::string datatype, lang;
      if (pos + 1 < s.size() && s[pos] == '^' && s[pos + 1] == '^') {
        pos += 2;
        if (pos >= s.size() || s[pos] != '<') fail("expected datatype IRI");
        size_t end = s.find('>', pos + 1);
        if (end == std::string::npos) fail("unterminated datatype IRI");
        datatype = s.substr(pos + 1, end - pos - 1);
        pos = end + 1;
      } else if (pos < s.size() && s[pos] == '@') {
        size_t start = ++pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])))
          ++pos;
        lang = s.substr(start, pos - start);
        if (lang.empty()) fail("empty language tag");
      }
      return Term::literal(unescape(raw), std::move(datatype), std::move(lang));
    }
    fail(std::string("expected ") + position_name);
  }
};

}  // namespace

std::vector<Triple> parse_ntriples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;

    LineScanner sc{line, first, line_no};
    Term s = sc.next_term("subject");
    if (s.is_literal()) sc.fail("literal in subject position");
    Term p = sc.next_term("predicate");
    if (!p.is_iri()) sc.fail("predicate must be an IRI");
    Term o = sc.next_term("object");
    sc.skip_ws();
    if (sc.pos >= line.size() || line[sc.pos] != '.')
      sc.fail("expected terminating '.'");
    ++sc.pos;
    if (!sc.at_end()) sc.fail("trailing content after '.'");
    out.push_back(Triple{std::move(s), std::move(p), std::move(o)});
  }
  return out;
}

std::vector<Triple> parse_ntriples(const std::string& text) {
  std::istringstream in(text);
  return parse_ntriples(in);
}

std::vector<Triple> load_ntriples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_ntriples(in);
}

namespace {

std::string escape_literal(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string serialize_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Iri:
      return "<" + t.text + ">";
    case Term::Kind::Blank:
      return "_:" + t.text;
    case Term::Kind::Literal: {
      std::string out = "\"" + escape_literal(t.text) + "\"";
      if (!t.datatype.empty()) out += "^^<" + t.datatype + ">";
      if (!t.lang.empty()) out += "@" + t.lang;
      return out;
    }
  }
  return {};
}

std::string serialize_triple(const Triple& t) {
  return serialize_term(t.s) + " " + serialize_term(t.p) + " " +
         serialize_term(t.o) + " .";
}

void write_ntriples(const std::vector<Triple>& triples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const Triple& t : triples) out << serialize_triple(t) << "\n";
}

Term parse_term(const std::string& text) {
  LineScanner sc{text, 0, 0};
  Term t = sc.next_term("term");
  if (!sc.at_end()) throw MalformedLine(0, "trailing content after term");
  return t;
}

}  // namespace rsr
