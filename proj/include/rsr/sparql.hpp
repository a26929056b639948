#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rsr/encode.hpp"
#include "rsr/rdf.hpp"

namespace rsr {

struct SyntaxError : ConfigError {
  size_t position;
  SyntaxError(size_t position, const std::string& expected);
};

struct UnboundSelectVariable : ConfigError {
  std::string name;
  explicit UnboundSelectVariable(const std::string& name);
};

using PatternTerm = std::variant<Term, Variable>;

inline bool is_variable(const PatternTerm& t) {
  return std::holds_alternative<Variable>(t);
}
inline const Variable& as_variable(const PatternTerm& t) {
  return std::get<Variable>(t);
}
inline const Term& as_term(const PatternTerm& t) { return std::get<Term>(t); }

struct TriplePattern {
  PatternTerm s, p, o;
};

// One comparison of the form `?v >= n` or `?v < n`.
struct Comparison {
  Variable var;
  enum class Op { Ge, Lt } op;
  uint64_t value;
};

struct FilterCondition {
  std::vector<Comparison> conjuncts;  // joined by &&
};

struct BodyNode;
using BodyPtr = std::unique_ptr<BodyNode>;

struct BodyNode {
  enum class Type { Bgp, Union, Filter };
  Type type = Type::Bgp;
  std::vector<TriplePattern> patterns;  // Bgp
  BodyPtr left, right;                  // Union
  BodyPtr child;                        // Filter
  FilterCondition condition;            // Filter
};

struct WindowSpec {
  enum class Kind { Count, Time } kind = Kind::Count;
  uint64_t count = 10000;   // triples per window
  uint64_t seconds = 10;    // window length for time windows
};

struct QueryAst {
  std::string name;
  std::vector<Variable> select_vars;
  BodyPtr body;
  ReasoningMode mode = ReasoningMode::LM;
  bool sameas_expansion = false;  // `#pragma sameas on`
  WindowSpec window;

  QueryAst clone() const;
  std::vector<TriplePattern> all_patterns() const;
};

// Subset grammar: PREFIX declarations, `#pragma reasoning LM|SAM|NONE`,
// `#pragma window count N | time S`, `#pragma sameas on|off`, then
// SELECT ?v... WHERE { ... } with `;` predicate lists, FILTER over integer
// comparisons, and UNION between groups. OPTIONAL is rejected.
QueryAst parse_query(const std::string& text);

// Canonical form with expanded IRIs; parse_query(print_query(q)) == q.
std::string print_query(const QueryAst& q);

bool ast_equal(const QueryAst& a, const QueryAst& b);

// The eight benchmark queries, keyed "Q1".."Q8". Q6..Q8 carry the sameAs
// expansion pragma.
std::map<std::string, QueryAst> builtin_queries();

}  // namespace rsr
