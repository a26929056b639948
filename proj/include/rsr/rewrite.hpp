#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rsr/encode.hpp"
#include "rsr/sparql.hpp"

namespace rsr {

/// One slot of a physical triple pattern: a dictionary id, a variable, or a
/// constant that missed every dictionary (kept lexical; only matches
/// unencoded stream terms).
using PlanSlot = std::variant<uint64_t, Variable, Term>;

struct PhysPattern {
  PlanSlot s, p, o;
};

struct RangeFilter {
  Variable var;
  uint64_t lb = 0;
  uint64_t ub = UINT64_MAX;
  std::vector<Interval> extras;

  bool matches(uint64_t id) const {
    if (id >= lb && id < ub) return true;
    for (const Interval& iv : extras)
      if (id >= iv.lb && id < iv.ub) return true;
    return false;
  }
};

struct ConjunctivePlan {
  std::vector<PhysPattern> patterns;
  std::vector<RangeFilter> range_filters;
  std::vector<size_t> join_order;  // permutation of pattern indices
  // The plain companion of a sameAs-expanded disjunct is excluded from the
  // join statistic; see plan_stats().
  bool counts_in_stats = true;
};

struct PhysicalQuery {
  std::string name;
  std::vector<Variable> select_vars;
  std::vector<ConjunctivePlan> disjuncts;
  ReasoningMode mode = ReasoningMode::LM;
};

// Hierarchy constants with sub-elements become fresh variables constrained
// by one range filter; everything else is encoded in place. Always a single
// disjunct per input conjunct. Throws UnknownTerm for constants absent from
// every dictionary.
PhysicalQuery rewrite_lm(const QueryAst& q, const DictionarySet& d);

// Classical reformulation: every inferable constant expands into its full
// sub-element set, one disjunct per combination, no range filters.
PhysicalQuery rewrite_classic(const QueryAst& q, const DictionarySet& d);

// Classic hierarchy expansion over materialization-scheme ids; when the
// query asks for sameAs expansion, each disjunct is paired with a variant
// whose shared subject variables are renamed apart and re-joined to a hub
// variable through sameAs patterns.
PhysicalQuery rewrite_sam(const QueryAst& q, const DictionarySet& d);

// No reasoning: constants are encoded where possible and left lexical
// otherwise. Used for the forward-chaining reference pipeline.
PhysicalQuery rewrite_none(const QueryAst& q, const DictionarySet& d);

struct PlanStats {
  size_t joins = 0;
  size_t unions = 0;
  size_t range_filters = 0;
};

PlanStats plan_stats(const PhysicalQuery& pq);

// Stable textual plan form for golden tests and the rewrite subcommand.
std::string print_plan(const PhysicalQuery& pq);

}  // namespace rsr
