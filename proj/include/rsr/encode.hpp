#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsr/cliques.hpp"
#include "rsr/hierarchy.hpp"
#include "rsr/rdf.hpp"

namespace rsr {

// The four id subspaces, distinguished by the top two bits of a 64-bit id.
enum class IdTag : uint64_t {
  Individual = 0,  // plain individuals, ids starting from 1
  Concept = 1,     // normalized concept ids
  Property = 2,    // normalized property ids
  Clique = 3,      // clique id (payload < 2^20) or packed (clique,local)
};

constexpr uint64_t kTagShift = 62;
constexpr uint64_t kPayloadMask = (1ULL << kTagShift) - 1;
constexpr uint64_t kLocalShift = 20;
constexpr uint64_t kLocalMask = (1ULL << kLocalShift) - 1;

constexpr uint64_t make_id(IdTag tag, uint64_t payload) {
  return (static_cast<uint64_t>(tag) << kTagShift) | payload;
}
constexpr IdTag tag_of(uint64_t id) {
  return static_cast<IdTag>(id >> kTagShift);
}
constexpr uint64_t payload_of(uint64_t id) { return id & kPayloadMask; }

// Clique members encode to the bare clique id under the collapsing scheme
// and to clique*2^20+local under the materialization scheme. Local ids are
// >= 1, so the two forms never collide and are self-describing.
constexpr uint64_t clique_collapsed_id(uint32_t clique) {
  return make_id(IdTag::Clique, clique);
}
constexpr uint64_t clique_packed_id(uint32_t clique, uint32_t local) {
  return make_id(IdTag::Clique, (uint64_t(clique) << kLocalShift) | local);
}
constexpr bool is_packed_clique_id(uint64_t id) {
  return tag_of(id) == IdTag::Clique && (payload_of(id) >> kLocalShift) != 0;
}

/// A stream term after partial encoding: either a dictionary id or the
/// original term passed through untouched.
struct EncodedTerm {
  uint64_t id = 0;
  const Term* lexical = nullptr;  // non-null iff the term missed every dictionary

  bool known() const { return lexical == nullptr; }
  static EncodedTerm known_id(uint64_t id) { return EncodedTerm{id, nullptr}; }
  static EncodedTerm unknown(const Term* t) { return EncodedTerm{0, t}; }

  friend bool operator==(const EncodedTerm& a, const EncodedTerm& b) {
    if (a.known() != b.known()) return false;
    return a.known() ? a.id == b.id : *a.lexical == *b.lexical;
  }
};

struct EncodedTermHash {
  size_t operator()(const EncodedTerm& t) const noexcept {
    return t.known() ? std::hash<uint64_t>{}(t.id) : TermHash{}(*t.lexical);
  }
};

struct EncodedTriple {
  EncodedTerm s, p, o;
  friend bool operator==(const EncodedTriple&, const EncodedTriple&) = default;
};

struct EncodedTripleHash {
  size_t operator()(const EncodedTriple& t) const noexcept {
    EncodedTermHash h;
    size_t r = h(t.s);
    r = r * 1099511628211ULL ^ h(t.p);
    r = r * 1099511628211ULL ^ h(t.o);
    return r;
  }
};

enum class ReasoningMode { LM, SAM, None };
enum class ExecPolicy { Serial, Parallel };

struct DanglingId : DataError {
  uint64_t id;
  explicit DanglingId(uint64_t id);
};

/// The precomputed dictionaries a stream is encoded against. Immutable after
/// construction; shared read-only across workers.
class DictionarySet {
 public:
  HierarchyDictionary concepts;
  HierarchyDictionary properties;
  CliqueDictionary cliques;
  std::unordered_map<Term, uint64_t, TermHash> individuals;  // payload, from 1
  std::vector<Term> individual_terms;                        // [id-1]

  /// Builds all four dictionaries from a static KB (ontology plus any static
  /// facts; both may live in the same file). Plain-individual ids follow
  /// first appearance among non-schema triples.
  static DictionarySet build(const std::vector<Triple>& ontology,
                             const std::vector<Triple>& static_facts = {});

  // Tagged id for a term, or 0 when absent everywhere. Lookup preference
  // depends on triple position; `mode` picks the clique id form.
  uint64_t encode_subject(const Term& t, ReasoningMode mode) const;
  uint64_t encode_predicate(const Term& t, ReasoningMode mode) const;
  uint64_t encode_object(const Term& t, ReasoningMode mode) const;

  uint64_t rdf_type_id() const;
  uint64_t sameas_id() const;

  void save(const std::string& dir) const;
  static DictionarySet load(const std::string& dir);

 private:
  uint64_t encode_term(const Term& t, ReasoningMode mode,
                       bool concepts_first) const;
};

// Per-triple dictionary lookup; misses stay as pointers into `triples`, so
// the input must outlive the result. Order is preserved; the parallel policy
// splits the batch by index and is bit-identical to the serial path.
std::vector<EncodedTriple> encode_batch(const std::vector<Triple>& triples,
                                        const DictionarySet& d,
                                        ReasoningMode mode,
                                        ExecPolicy policy = ExecPolicy::Serial);

// Encoded form of the k^2-per-clique sameAs closure, built straight from the
// clique dictionary (agrees with encoding materialize_sameas's output).
std::vector<EncodedTriple> encoded_sameas_closure(const DictionarySet& d);

/// Named columns over a bag of encoded rows (row-major storage).
struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
  friend std::strong_ordering operator<=>(const Variable&, const Variable&) = default;
};

struct VariableHash {
  size_t operator()(const Variable& v) const noexcept {
    return std::hash<std::string>{}(v.name);
  }
};

class BindingTable {
 public:
  std::vector<Variable> columns;
  std::vector<EncodedTerm> cells;  // row-major, cells.size() % columns.size() == 0

  size_t width() const { return columns.size(); }
  size_t row_count() const { return columns.empty() ? 0 : cells.size() / columns.size(); }
  const EncodedTerm* row(size_t r) const { return cells.data() + r * width(); }
  int column_index(const Variable& v) const;
};

/// Decoded result rows. Known ids resolve through the reverse maps
/// (DanglingId when absent); unknown terms pass through. A collapsed clique
/// id becomes the representative when expand is false and fans out to one
/// row per member when expand is true.
std::vector<std::vector<Term>> decode_bindings(const BindingTable& rows,
                                               const DictionarySet& d,
                                               bool expand);

Term decode_id(uint64_t id, const DictionarySet& d);  // representative form

}  // namespace rsr
