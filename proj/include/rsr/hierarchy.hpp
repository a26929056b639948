#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rsr/rdf.hpp"

namespace rsr {

struct CyclicHierarchy : DataError {
  std::vector<Term> cycle;
  explicit CyclicHierarchy(std::vector<Term> cycle);
};

struct CapacityExceeded : DataError {
  using DataError::DataError;
};

struct UnknownTerm : DataError {
  Term term;
  explicit UnknownTerm(const Term& t);
};

struct VersionMismatch : DataError {
  using DataError::DataError;
};

struct CorruptDictionary : DataError {
  using DataError::DataError;
};

enum class HierarchyKind { Concept, Property };

/// Subsumption edges and sameAs assertions extracted from a static KB.
/// Edge and declaration order follow first appearance in the input; this
/// order drives identifier assignment and must stay stable.
struct OntologyGraph {
  std::vector<std::pair<Term, Term>> class_edges;     // (sub, super)
  std::vector<std::pair<Term, Term>> property_edges;  // (sub, super)
  std::vector<std::pair<Term, Term>> domain_edges;    // parsed, unused
  std::vector<std::pair<Term, Term>> range_edges;     // parsed, unused
  std::vector<std::pair<Term, Term>> sameas_assertions;
  std::vector<Term> declared_classes;     // includes owl:Thing
  std::vector<Term> declared_properties;  // includes the synthetic root
};

// Builds the graph from parsed triples. Adds owl:Thing as the concept root
// and a synthetic root property; self-loop edges are dropped. Cycles are
// detected later, in classify().
OntologyGraph extract_tbox(const std::vector<Triple>& triples);

/// classify() output: a primary-parent tree over the declared terms plus the
/// full transitive closure of the subsumption DAG (kept as the oracle that
/// extra intervals are checked against).
struct ClassifiedForest {
  HierarchyKind kind;
  std::vector<Term> nodes;  // index 0 is the root
  std::unordered_map<Term, int, TermHash> index;
  std::vector<int> primary_parent;            // -1 for the root
  std::vector<std::vector<int>> children;     // primary-tree children, in declaration order
  std::vector<std::vector<int>> extra_parents;  // non-primary parents
  std::vector<std::vector<int>> ancestors;    // transitive closure, excl. self
  std::vector<std::vector<int>> descendants;  // inverse closure, excl. self
};

// Throws CyclicHierarchy if the subsumption edges of the chosen kind contain
// a cycle (self-loops were already dropped). Multi-parent nodes get as
// primary parent the candidate with the most ancestors, ties broken by
// ascending term order.
ClassifiedForest classify(const OntologyGraph& g, HierarchyKind kind);

struct Interval {
  uint64_t lb = 0, ub = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A term's prefix code and the derived subsumption interval.
///   lower_bound = raw_id << (T - bit_length)
///   upper_bound = (raw_id + 1) << (T - bit_length)
/// extra_intervals cover descendants reachable only through non-primary
/// parents.
struct EncodedEntry {
  uint64_t raw_id = 0;
  unsigned bit_length = 0;
  uint64_t normalized_id = 0;
  uint64_t lower_bound = 0;
  uint64_t upper_bound = 0;
  std::vector<Interval> extra_intervals;

  bool covers(uint64_t id) const {
    if (id >= lower_bound && id < upper_bound) return true;
    for (const Interval& iv : extra_intervals)
      if (id >= iv.lb && id < iv.ub) return true;
    return false;
  }
};

struct Bounds {
  uint64_t lb = 0, ub = 0;
  std::vector<Interval> extras;
};

class HierarchyDictionary {
 public:
  HierarchyKind kind = HierarchyKind::Concept;
  unsigned total_bits = 0;
  std::unordered_map<Term, EncodedEntry, TermHash> entries;
  std::map<uint64_t, Term> reverse;  // normalized id -> term, ascending

  bool contains(const Term& t) const { return entries.count(t) > 0; }
  const EncodedEntry& entry(const Term& t) const;  // throws UnknownTerm
  Bounds bounds(const Term& t) const;              // throws UnknownTerm
  bool is_subsumed(const Term& sub, const Term& super) const;  // reflexive
  const Term* term_of(uint64_t normalized_id) const;

  /// Number of dictionary terms inside the term's interval and extras,
  /// including the term itself. 1 means leaf.
  size_t subtree_size(const Term& t) const;

  /// All dictionary terms subsumed by t (t included), ascending id order.
  std::vector<Term> subtree_terms(const Term& t) const;
};

// Assigns prefix codes over the primary tree: the root gets raw id 1; a node
// with c children gives each a suffix of ceil(log2(c+1)) bits valued 1..c in
// declaration order (suffix 0 stays reserved so a parent's zero-padded id
// equals its own lower bound). Throws CapacityExceeded when total width
// would exceed max_bits.
HierarchyDictionary encode_hierarchy(const ClassifiedForest& forest,
                                     unsigned max_bits = 62);

// Dictionary file: header `litemat-dict v1 <kind> T=<bits>`, then one TSV row
// per term in ascending normalized-id order. Byte-reproducible.
void save_dictionary(const HierarchyDictionary& d, const std::string& path);
HierarchyDictionary load_dictionary(const std::string& path);

}  // namespace rsr
