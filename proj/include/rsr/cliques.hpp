#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rsr/rdf.hpp"

namespace rsr {

struct CliqueId {
  uint32_t clique = 0;  // >= 1
  uint32_t local = 0;   // >= 1, contiguous within the clique
  friend bool operator==(const CliqueId&, const CliqueId&) = default;
};

/// Connected components of the sameAs graph, singletons excluded. Clique ids
/// are assigned in ascending order of each component's smallest member;
/// local ids in ascending member order. The member with local id 1 is the
/// clique's representative.
class CliqueDictionary {
 public:
  std::unordered_map<Term, CliqueId, TermHash> member_ids;
  std::vector<std::vector<Term>> members;  // [cliqueId-1], local-id order

  std::optional<CliqueId> lookup(const Term& t) const;
  const Term& representative(uint32_t clique_id) const;
  const std::vector<Term>& clique(uint32_t clique_id) const;
  size_t clique_count() const { return members.size(); }

  /// Sum over cliques of k^2 (the SAM materialization volume).
  uint64_t materialized_count() const;
};

// Self-loop assertions are ignored. Throws CapacityExceeded when a clique id
// or local id would not fit in 20 bits (the packed-id layout).
CliqueDictionary build_cliques(const std::vector<std::pair<Term, Term>>& sameas);

// All k^2 ordered member pairs per clique, reflexive pairs included,
// streamed in (cliqueId, subject local, object local) order.
void materialize_sameas(const CliqueDictionary& d,
                        const std::function<void(const Triple&)>& sink);
std::vector<Triple> materialize_sameas(const CliqueDictionary& d);

// TSV `term \t cliqueId \t localId`, ascending (cliqueId, localId).
void save_cliques(const CliqueDictionary& d, const std::string& path);
CliqueDictionary load_cliques(const std::string& path);

}  // namespace rsr
