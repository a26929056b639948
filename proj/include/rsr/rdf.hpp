#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsr/errors.hpp"

namespace rsr {

/// An RDF term. A literal carries at most one of datatype IRI and language
/// tag; IRIs are non-empty and contain no whitespace.
struct Term {
  enum class Kind : uint8_t { Iri, Blank, Literal };

  Kind kind = Kind::Iri;
  std::string text;      // IRI text, blank-node label, or literal lexical form
  std::string datatype;  // literal datatype IRI, empty if none
  std::string lang;      // literal language tag, empty if none

  static Term iri(std::string text);
  static Term blank(std::string label);
  static Term literal(std::string lexical, std::string datatype = {},
                      std::string lang = {});

  bool is_iri() const { return kind == Kind::Iri; }
  bool is_blank() const { return kind == Kind::Blank; }
  bool is_literal() const { return kind == Kind::Literal; }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term&, const Term&) = default;
};

struct TermHash {
  size_t operator()(const Term& t) const noexcept;
};

struct Triple {
  Term s, p, o;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct MalformedLine : DataError {
  size_t line;
  MalformedLine(size_t line, const std::string& reason);
};

// Line-oriented N-Triples subset: `<s> <p> <o> .`, blank nodes as `_:label`,
// literals as `"..."` with optional `^^<dt>` or `@lang`, `#` comments.
// Throws MalformedLine on the first bad line.
std::vector<Triple> parse_ntriples(std::istream& in);
std::vector<Triple> parse_ntriples(const std::string& text);
std::vector<Triple> load_ntriples(const std::string& path);

std::string serialize_term(const Term& t);
std::string serialize_triple(const Triple& t);  // one line incl. ` .`
void write_ntriples(const std::vector<Triple>& triples, const std::string& path);

// Parses a single term in serialized form (used by dictionary files).
Term parse_term(const std::string& text);

// Well-known vocabulary.
namespace vocab {
inline const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const char* kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline const char* kRdfsSubPropertyOf = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
inline const char* kRdfsDomain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline const char* kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";
inline const char* kOwlSameAs = "http://www.w3.org/2002/07/owl#sameAs";
inline const char* kOwlThing = "http://www.w3.org/2002/07/owl#Thing";
inline const char* kTopProperty = "urn:rsr:topProperty";
}  // namespace vocab

}  // namespace rsr
