#include "rsr/encode.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>

namespace rsr {

DanglingId::DanglingId(uint64_t id)
    : DataError("no reverse entry for id " + std::to_string(id)), id(id) {}

DictionarySet DictionarySet::build(const std::vector<Triple>& ontology,
                                   const std::vector<Triple>& static_facts) {
  std::vector<Triple> merged = ontology;
  merged.insert(merged.end(), static_facts.begin(), static_facts.end());

  OntologyGraph g = extract_tbox(merged);

  DictionarySet d;
  d.concepts = encode_hierarchy(classify(g, HierarchyKind::Concept));
  d.properties = encode_hierarchy(classify(g, HierarchyKind::Property));
  d.cliques = build_cliques(g.sameas_assertions);

  // Plain individuals: subjects and objects of non-schema triples that are
  // not hierarchy terms or clique members. rdf:type objects are skipped when
  // they name a known concept.
  auto add_individual = [&](const Term& t) {
    if (d.cliques.lookup(t) || d.concepts.contains(t) || d.properties.contains(t))
      return;
    auto [it, inserted] =
        d.individuals.emplace(t, d.individuals.size() + 1);
    (void)it;
    if (inserted) d.individual_terms.push_back(t);
  };
  for (const Triple& t : merged) {
    if (!t.p.is_iri()) continue;
    const std::string& p = t.p.text;
    if (p == vocab::kRdfsSubClassOf || p == vocab::kRdfsSubPropertyOf ||
        p == vocab::kRdfsDomain || p == vocab::kRdfsRange ||
        p == vocab::kOwlSameAs)
      continue;
    add_individual(t.s);
    if (p == vocab::kRdfType && d.concepts.contains(t.o)) continue;
    add_individual(t.o);
  }
  if (d.individuals.size() >= (1ULL << kTagShift))
    throw CapacityExceeded("too many individuals");
  return d;
}

uint64_t DictionarySet::encode_term(const Term& t, ReasoningMode mode,
                                    bool concepts_first) const {
  if (concepts_first) {
    if (auto it = concepts.entries.find(t); it != concepts.entries.end())
      return make_id(IdTag::Concept, it->second.normalized_id);
  }
  if (auto c = cliques.lookup(t)) {
    return mode == ReasoningMode::LM ? clique_collapsed_id(c->clique)
                                     : clique_packed_id(c->clique, c->local);
  }
  if (auto it = individuals.find(t); it != individuals.end())
    return make_id(IdTag::Individual, it->second);
  if (!concepts_first) {
    if (auto it = concepts.entries.find(t); it != concepts.entries.end())
      return make_id(IdTag::Concept, it->second.normalized_id);
  }
  if (auto it = properties.entries.find(t); it != properties.entries.end())
    return make_id(IdTag::Property, it->second.normalized_id);
  return 0;
}

uint64_t DictionarySet::encode_subject(const Term& t, ReasoningMode mode) const {
  return encode_term(t, mode, /*concepts_first=*/false);
}

uint64_t DictionarySet::encode_object(const Term& t, ReasoningMode mode) const {
  return encode_term(t, mode, /*concepts_first=*/true);
}

uint64_t DictionarySet::encode_predicate(const Term& t, ReasoningMode) const {
  if (auto it = properties.entries.find(t); it != properties.entries.end())
    return make_id(IdTag::Property, it->second.normalized_id);
  return 0;
}

uint64_t DictionarySet::rdf_type_id() const {
  return make_id(IdTag::Property,
                 properties.entry(Term::iri(vocab::kRdfType)).normalized_id);
}

uint64_t DictionarySet::sameas_id() const {
  return make_id(IdTag::Property,
                 properties.entry(Term::iri(vocab::kOwlSameAs)).normalized_id);
}

namespace {

EncodedTerm encode_one(const Term& t, uint64_t id) {
  return id != 0 ? EncodedTerm::known_id(id) : EncodedTerm::unknown(&t);
}

EncodedTriple encode_triple(const Triple& t, const DictionarySet& d,
                            ReasoningMode mode) {
  return EncodedTriple{
      encode_one(t.s, d.encode_subject(t.s, mode)),
      encode_one(t.p, d.encode_predicate(t.p, mode)),
      encode_one(t.o, d.encode_object(t.o, mode)),
  };
}

}  // namespace

std::vector<EncodedTriple> encode_batch(const std::vector<Triple>& triples,
                                        const DictionarySet& d,
                                        ReasoningMode mode, ExecPolicy policy) {
  std::vector<EncodedTriple> out(triples.size());
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < triples.size(); ++i)
      out[i] = encode_triple(triples[i], d, mode);
  } else {
    for (size_t i = 0; i < triples.size(); ++i)
      out[i] = encode_triple(triples[i], d, mode);
  }
  return out;
}

std::vector<EncodedTriple> encoded_sameas_closure(const DictionarySet& d) {
  const EncodedTerm same_as = EncodedTerm::known_id(d.sameas_id());
  std::vector<EncodedTriple> out;
  out.reserve(d.cliques.materialized_count());
  for (uint32_t c = 1; c <= d.cliques.clique_count(); ++c) {
    const uint32_t k = static_cast<uint32_t>(d.cliques.clique(c).size());
    for (uint32_t a = 1; a <= k; ++a)
      for (uint32_t b = 1; b <= k; ++b)
        out.push_back(EncodedTriple{EncodedTerm::known_id(clique_packed_id(c, a)),
                                    same_as,
                                    EncodedTerm::known_id(clique_packed_id(c, b))});
  }
  return out;
}

int BindingTable::column_index(const Variable& v) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == v) return static_cast<int>(i);
  return -1;
}

Term decode_id(uint64_t id, const DictionarySet& d) {
  switch (tag_of(id)) {
    case IdTag::Individual: {
      uint64_t n = payload_of(id);
      if (n == 0 || n > d.individual_terms.size()) throw DanglingId(id);
      return d.individual_terms[n - 1];
    }
    case IdTag::Concept: {
      const Term* t = d.concepts.term_of(payload_of(id));
      if (!t) throw DanglingId(id);
      return *t;
    }
    case IdTag::Property: {
      const Term* t = d.properties.term_of(payload_of(id));
      if (!t) throw DanglingId(id);
      return *t;
    }
    case IdTag::Clique: {
      uint64_t payload = payload_of(id);
      uint32_t clique, local;
      if (is_packed_clique_id(id)) {
        clique = static_cast<uint32_t>(payload >> kLocalShift);
        local = static_cast<uint32_t>(payload & kLocalMask);
      } else {
        clique = static_cast<uint32_t>(payload);
        local = 1;  // representative
      }
      if (clique == 0 || clique > d.cliques.clique_count()) throw DanglingId(id);
      const auto& group = d.cliques.clique(clique);
      if (local == 0 || local > group.size()) throw DanglingId(id);
      return group[local - 1];
    }
  }
  throw DanglingId(id);
}

std::vector<std::vector<Term>> decode_bindings(const BindingTable& rows,
                                               const DictionarySet& d,
                                               bool expand) {
  std::vector<std::vector<Term>> out;
  const size_t w = rows.width();
  std::vector<Term> current(w);

  // Collapsed clique ids fan out per column; expansion is a cartesian
  // product across clique-valued columns in local-id order.
  std::function<void(const EncodedTerm*, size_t)> emit =
      [&](const EncodedTerm* row, size_t col) {
        if (col == w) {
          out.push_back(current);
          return;
        }
        const EncodedTerm& cell = row[col];
        if (!cell.known()) {
          current[col] = *cell.lexical;
          emit(row, col + 1);
          return;
        }
        if (expand && tag_of(cell.id) == IdTag::Clique &&
            !is_packed_clique_id(cell.id)) {
          uint32_t clique = static_cast<uint32_t>(payload_of(cell.id));
          if (clique == 0 || clique > d.cliques.clique_count())
            throw DanglingId(cell.id);
          for (const Term& m : d.cliques.clique(clique)) {
            current[col] = m;
            emit(row, col + 1);
          }
          return;
        }
        current[col] = decode_id(cell.id, d);
        emit(row, col + 1);
      };

  for (size_t r = 0; r < rows.row_count(); ++r) emit(rows.row(r), 0);
  return out;
}

void DictionarySet::save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  save_dictionary(concepts, dir + "/concepts.dict");
  save_dictionary(properties, dir + "/properties.dict");
  save_cliques(cliques, dir + "/cliques.dict");
  std::ofstream out(dir + "/individuals.dict");
  if (!out) throw DataError("cannot write " + dir + "/individuals.dict");
  out << "litemat-individuals v1\n";
  for (size_t i = 0; i < individual_terms.size(); ++i)
    out << serialize_term(individual_terms[i]) << "\t" << (i + 1) << "\n";
}

DictionarySet DictionarySet::load(const std::string& dir) {
  DictionarySet d;
  d.concepts = load_dictionary(dir + "/concepts.dict");
  d.properties = load_dictionary(dir + "/properties.dict");
  if (d.concepts.kind != HierarchyKind::Concept ||
      d.properties.kind != HierarchyKind::Property)
    throw CorruptDictionary("dictionary kinds swapped in " + dir);
  d.cliques = load_cliques(dir + "/cliques.dict");

  std::ifstream in(dir + "/individuals.dict");
  if (!in) throw DataError("cannot open " + dir + "/individuals.dict");
  std::string header;
  std::getline(in, header);
  if (header != "litemat-individuals v1")
    throw CorruptDictionary("bad individuals header: " + header);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw CorruptDictionary("bad row: " + line);
    Term t;
    uint64_t id = 0;
    try {
      t = parse_term(line.substr(0, tab));
      id = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw CorruptDictionary("bad row: " + line);
    }
    if (id != d.individual_terms.size() + 1)
      throw CorruptDictionary("individual ids must be contiguous: " + line);
    d.individual_terms.push_back(t);
    d.individuals.emplace(std::move(t), id);
  }
  return d;
}

}  // namespace rsr
