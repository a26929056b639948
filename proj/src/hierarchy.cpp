#include "rsr/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rsr {

CyclicHierarchy::CyclicHierarchy(std::vector<Term> c)
    : DataError([&c] {
        std::string msg = "cyclic hierarchy:";
        for (const Term& t : c) msg += " " + serialize_term(t);
        return msg;
      }()),
      cycle(std::move(c)) {}

UnknownTerm::UnknownTerm(const Term& t)
    : DataError("unknown term " + serialize_term(t)), term(t) {}

namespace {

struct OrderedTermSet {
  std::vector<Term> order;
  std::unordered_set<Term, TermHash> seen;

  void add(const Term& t) {
    if (seen.insert(t).second) order.push_back(t);
  }
};

}  // namespace

OntologyGraph extract_tbox(const std::vector<Triple>& triples) {
  OntologyGraph g;
  OrderedTermSet classes, properties;
  classes.add(Term::iri(vocab::kOwlThing));
  properties.add(Term::iri(vocab::kTopProperty));
  // Reserved properties so rdf:type patterns (and SAM's sameAs patterns) are
  // always encodable, whatever the input ontology declares.
  properties.add(Term::iri(vocab::kRdfType));
  properties.add(Term::iri(vocab::kOwlSameAs));

  std::unordered_set<std::string> seen_class_edges, seen_prop_edges;
  for (const Triple& t : triples) {
    if (!t.p.is_iri()) continue;
    const std::string& p = t.p.text;
    if (p == vocab::kRdfsSubClassOf) {
      if (t.s == t.o) continue;  // self-loop
      std::string key = serialize_term(t.s) + "\t" + serialize_term(t.o);
      if (!seen_class_edges.insert(key).second) continue;
      g.class_edges.emplace_back(t.s, t.o);
      classes.add(t.s);
      classes.add(t.o);
    } else if (p == vocab::kRdfsSubPropertyOf) {
      if (t.s == t.o) continue;
      std::string key = serialize_term(t.s) + "\t" + serialize_term(t.o);
      if (!seen_prop_edges.insert(key).second) continue;
      g.property_edges.emplace_back(t.s, t.o);
      properties.add(t.s);
      properties.add(t.o);
    } else if (p == vocab::kRdfsDomain) {
      g.domain_edges.emplace_back(t.s, t.o);
      properties.add(t.s);
    } else if (p == vocab::kRdfsRange) {
      g.range_edges.emplace_back(t.s, t.o);
      properties.add(t.s);
    } else if (p == vocab::kOwlSameAs) {
      g.sameas_assertions.emplace_back(t.s, t.o);
    }
  }
  g.declared_classes = std::move(classes.order);
  g.declared_properties = std::move(properties.order);
  return g;
}

namespace {

std::vector<int> topological_order(const std::vector<std::vector<int>>& parents,
                                   const std::vector<Term>& nodes) {
  const int n = static_cast<int>(nodes.size());
  // Edge child -> parent; process parents before children.
  std::vector<std::vector<int>> children_of(n);
  std::vector<int> unresolved(n, 0);
  for (int v = 0; v < n; ++v) {
    unresolved[v] = static_cast<int>(parents[v].size());
    for (int p : parents[v]) children_of[p].push_back(v);
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (unresolved[v] == 0) queue.push_back(v);
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    order.push_back(v);
    for (int c : children_of[v])
      if (--unresolved[c] == 0) queue.push_back(c);
  }
  if (static_cast<int>(order.size()) != n) {
    // Extract one cycle among the unresolved nodes for the error message.
    std::vector<bool> resolved(n, false);
    for (int v : order) resolved[v] = true;
    int start = 0;
    while (resolved[start]) ++start;
    std::vector<int> path;
    std::vector<int> pos_in_path(n, -1);
    int cur = start;
    while (pos_in_path[cur] == -1) {
      pos_in_path[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      for (int p : parents[cur]) {
        if (!resolved[p]) {
          cur = p;
          break;
        }
      }
    }
    std::vector<Term> cycle;
    for (size_t i = pos_in_path[cur]; i < path.size(); ++i)
      cycle.push_back(nodes[path[i]]);
    std::sort(cycle.begin(), cycle.end());
    throw CyclicHierarchy(std::move(cycle));
  }
  return order;
}

}  // namespace

ClassifiedForest classify(const OntologyGraph& g, HierarchyKind kind) {
  const auto& declared = kind == HierarchyKind::Concept ? g.declared_classes
                                                        : g.declared_properties;
  const auto& edges =
      kind == HierarchyKind::Concept ? g.class_edges : g.property_edges;

  ClassifiedForest f;
  f.kind = kind;
  f.nodes = declared;
  for (int i = 0; i < static_cast<int>(f.nodes.size()); ++i)
    f.index[f.nodes[i]] = i;

  const int n = static_cast<int>(f.nodes.size());
  std::vector<std::vector<int>> parents(n);
  for (const auto& [sub, super] : edges) {
    int c = f.index.at(sub);
    int p = f.index.at(super);
    if (std::find(parents[c].begin(), parents[c].end(), p) == parents[c].end())
      parents[c].push_back(p);
  }
  // Parentless nodes hang off the root.
  for (int v = 1; v < n; ++v)
    if (parents[v].empty()) parents[v].push_back(0);

  std::vector<int> topo = topological_order(parents, f.nodes);

  // Transitive closure, parents processed before children.
  f.ancestors.assign(n, {});
  for (int v : topo) {
    std::unordered_set<int> anc;
    for (int p : parents[v]) {
      anc.insert(p);
      anc.insert(f.ancestors[p].begin(), f.ancestors[p].end());
    }
    f.ancestors[v].assign(anc.begin(), anc.end());
    std::sort(f.ancestors[v].begin(), f.ancestors[v].end());
  }
  f.descendants.assign(n, {});
  for (int v = 0; v < n; ++v)
    for (int a : f.ancestors[v]) f.descendants[a].push_back(v);

  // Primary parent: most ancestors wins, then ascending term order.
  f.primary_parent.assign(n, -1);
  f.extra_parents.assign(n, {});
  for (int v = 1; v < n; ++v) {
    int best = parents[v][0];
    for (size_t i = 1; i < parents[v].size(); ++i) {
      int cand = parents[v][i];
      size_t bd = f.ancestors[best].size(), cd = f.ancestors[cand].size();
      if (cd > bd || (cd == bd && f.nodes[cand] < f.nodes[best])) best = cand;
    }
    f.primary_parent[v] = best;
    for (int p : parents[v])
      if (p != best) f.extra_parents[v].push_back(p);
  }
  f.children.assign(n, {});
  for (int v = 1; v < n; ++v) f.children[f.primary_parent[v]].push_back(v);
  return f;
}

namespace {

unsigned suffix_width(size_t child_count) {
  // Smallest w with 2^w > child_count, so suffix 0 stays reserved.
  unsigned w = 1;
  while ((1ULL << w) <= child_count) ++w;
  return w;
}

}  // namespace

HierarchyDictionary encode_hierarchy(const ClassifiedForest& forest,
                                     unsigned max_bits) {
  const int n = static_cast<int>(forest.nodes.size());
  std::vector<uint64_t> raw(n, 0);
  std::vector<unsigned> len(n, 0);
  raw[0] = 1;
  len[0] = 1;

  // Depth-first in child declaration order.
  std::vector<int> stack{0};
  unsigned total_bits = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    const auto& kids = forest.children[v];
    if (kids.empty()) continue;
    unsigned w = suffix_width(kids.size());
    for (size_t i = 0; i < kids.size(); ++i) {
      int c = kids[i];
      len[c] = len[v] + w;
      if (len[c] > max_bits)
        throw CapacityExceeded("hierarchy needs " + std::to_string(len[c]) +
                               " bits, maximum is " + std::to_string(max_bits));
      raw[c] = (raw[v] << w) | (i + 1);
      total_bits = std::max(total_bits, len[c]);
      stack.push_back(c);
    }
  }

  HierarchyDictionary d;
  d.kind = forest.kind;
  d.total_bits = total_bits;
  std::vector<uint64_t> norm(n);
  for (int v = 0; v < n; ++v) {
    EncodedEntry e;
    e.raw_id = raw[v];
    e.bit_length = len[v];
    unsigned shift = total_bits - len[v];
    e.normalized_id = raw[v] << shift;
    e.lower_bound = e.normalized_id;
    e.upper_bound = (raw[v] + 1) << shift;
    norm[v] = e.normalized_id;
    d.entries.emplace(forest.nodes[v], std::move(e));
    d.reverse.emplace(norm[v], forest.nodes[v]);
  }
  if (d.reverse.size() != static_cast<size_t>(n))
    throw CapacityExceeded("normalized id collision");

  // Attach intervals for descendants that the primary prefix does not cover.
  for (int v = 0; v < n; ++v) {
    if (forest.descendants[v].empty()) continue;
    EncodedEntry& e = d.entries.at(forest.nodes[v]);
    std::vector<int> uncovered;
    for (int dsc : forest.descendants[v])
      if (!(norm[dsc] >= e.lower_bound && norm[dsc] < e.upper_bound))
        uncovered.push_back(dsc);
    if (uncovered.empty()) continue;
    // Outermost intervals first: ascending lb, descending ub.
    std::sort(uncovered.begin(), uncovered.end(), [&](int a, int b) {
      const EncodedEntry& ea = d.entries.at(forest.nodes[a]);
      const EncodedEntry& eb = d.entries.at(forest.nodes[b]);
      if (ea.lower_bound != eb.lower_bound)
        return ea.lower_bound < eb.lower_bound;
      return ea.upper_bound > eb.upper_bound;
    });
    for (int dsc : uncovered) {
      if (e.covers(norm[dsc])) continue;
      const EncodedEntry& ed = d.entries.at(forest.nodes[dsc]);
      e.extra_intervals.push_back({ed.lower_bound, ed.upper_bound});
    }
  }
  return d;
}

const EncodedEntry& HierarchyDictionary::entry(const Term& t) const {
  auto it = entries.find(t);
  if (it == entries.end()) throw UnknownTerm(t);
  return it->second;
}

Bounds HierarchyDictionary::bounds(const Term& t) const {
  const EncodedEntry& e = entry(t);
  return Bounds{e.lower_bound, e.upper_bound, e.extra_intervals};
}

bool HierarchyDictionary::is_subsumed(const Term& sub, const Term& super) const {
  const EncodedEntry& s = entry(sub);
  const EncodedEntry& p = entry(super);
  return p.covers(s.normalized_id);
}

const Term* HierarchyDictionary::term_of(uint64_t normalized_id) const {
  auto it = reverse.find(normalized_id);
  return it == reverse.end() ? nullptr : &it->second;
}

size_t HierarchyDictionary::subtree_size(const Term& t) const {
  const EncodedEntry& e = entry(t);
  size_t count = 0;
  for (const auto& [id, term] : reverse)
    if (e.covers(id)) ++count;
  return count;
}

std::vector<Term> HierarchyDictionary::subtree_terms(const Term& t) const {
  const EncodedEntry& e = entry(t);
  std::vector<Term> out;
  for (const auto& [id, term] : reverse)
    if (e.covers(id)) out.push_back(term);
  return out;
}

void save_dictionary(const HierarchyDictionary& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "litemat-dict v1 "
      << (d.kind == HierarchyKind::Concept ? "concept" : "property")
      << " T=" << d.total_bits << "\n";
  for (const auto& [id, term] : d.reverse) {
    const EncodedEntry& e = d.entries.at(term);
    out << serialize_term(term) << "\t" << e.raw_id << "\t" << e.bit_length
        << "\t" << e.normalized_id << "\t" << e.lower_bound << "\t"
        << e.upper_bound << "\t";
    for (size_t i = 0; i < e.extra_intervals.size(); ++i) {
      if (i) out << ";";
      out << e.extra_intervals[i].lb << ":" << e.extra_intervals[i].ub;
    }
    out << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CorruptDictionary(std::string("bad ") + what + ": '" + s + "'");
  }
}

}  // namespace

HierarchyDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw CorruptDictionary("empty file");
  std::istringstream hs(header);
  std::string magic, version, kind, tfield;
  hs >> magic >> version >> kind >> tfield;
  if (magic != "litemat-dict")
    throw CorruptDictionary("not a dictionary file: " + path);
  if (version != "v1") throw VersionMismatch("unsupported version " + version);
  HierarchyDictionary d;
  if (kind == "concept")
    d.kind = HierarchyKind::Concept;
  else if (kind == "property")
    d.kind = HierarchyKind::Property;
  else
    throw CorruptDictionary("bad kind " + kind);
  if (tfield.rfind("T=", 0) != 0) throw CorruptDictionary("missing T= field");
  d.total_bits = static_cast<unsigned>(parse_u64(tfield.substr(2), "total bits"));

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 7) throw CorruptDictionary("bad row: " + line);
    Term term;
    try {
      term = parse_term(cols[0]);
    } catch (const MalformedLine&) {
      throw CorruptDictionary("bad term: " + cols[0]);
    }
    EncodedEntry e;
    e.raw_id = parse_u64(cols[1], "raw id");
    e.bit_length = static_cast<unsigned>(parse_u64(cols[2], "bit length"));
    e.normalized_id = parse_u64(cols[3], "normalized id");
    e.lower_bound = parse_u64(cols[4], "lower bound");
    e.upper_bound = parse_u64(cols[5], "upper bound");
    if (e.bit_length == 0 || e.bit_length > d.total_bits ||
        e.normalized_id != (e.raw_id << (d.total_bits - e.bit_length)) ||
        e.lower_bound != e.normalized_id ||
        e.upper_bound != ((e.raw_id + 1) << (d.total_bits - e.bit_length)))
      throw CorruptDictionary("inconsistent entry: " + cols[0]);
    if (!cols[6].empty()) {
      for (const std::string& part : split(cols[6], ';')) {
        auto lbub = split(part, ':');
        if (lbub.size() != 2) throw CorruptDictionary("bad extras: " + cols[6]);
        Interval iv{parse_u64(lbub[0], "extra lb"), parse_u64(lbub[1], "extra ub")};
        if (iv.lb >= iv.ub) throw CorruptDictionary("bad extras: " + cols[6]);
        e.extra_intervals.push_back(iv);
      }
    }
    if (!d.reverse.emplace(e.normalized_id, term).second)
      throw CorruptDictionary("duplicate id " + std::to_string(e.normalized_id));
    if (!d.entries.emplace(term, std::move(e)).second)
      throw CorruptDictionary("duplicate term " + cols[0]);
  }
  if (d.entries.empty()) throw CorruptDictionary("no entries in " + path);
  return d;
}

}  // namespace rsr
