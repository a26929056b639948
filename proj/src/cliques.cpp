#include "rsr/cliques.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "rsr/hierarchy.hpp"

namespace rsr {

namespace {

constexpr uint32_t kMaxPackable = (1u << 20) - 1;

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

CliqueDictionary build_cliques(
    const std::vector<std::pair<Term, Term>>& sameas) {
  std::vector<Term> terms;
  std::unordered_map<Term, int, TermHash> index;
  auto intern = [&](const Term& t) {
    auto [it, inserted] = index.emplace(t, static_cast<int>(terms.size()));
    if (inserted) terms.push_back(t);
    return it->second;
  };

  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : sameas) {
    if (a == b) continue;
    edges.emplace_back(intern(a), intern(b));
  }

  UnionFind uf(terms.size());
  for (auto [a, b] : edges) uf.unite(a, b);

  std::unordered_map<int, std::vector<int>> components;
  for (int i = 0; i < static_cast<int>(terms.size()); ++i)
    components[uf.find(i)].push_back(i);

  std::vector<std::vector<Term>> cliques;
  for (auto& [root, ids] : components) {
    if (ids.size() < 2) continue;  // singletons are not cliques
    std::vector<Term> group;
    group.reserve(ids.size());
    for (int i : ids) group.push_back(terms[i]);
    std::sort(group.begin(), group.end());
    cliques.push_back(std::move(group));
  }
  std::sort(cliques.begin(), cliques.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  CliqueDictionary d;
  d.members = std::move(cliques);
  if (d.members.size() > kMaxPackable)
    throw CapacityExceeded("too many cliques for packed ids");
  for (uint32_t c = 0; c < d.members.size(); ++c) {
    if (d.members[c].size() > kMaxPackable)
      throw CapacityExceeded("clique too large for packed ids");
    for (uint32_t l = 0; l < d.members[c].size(); ++l)
      d.member_ids.emplace(d.members[c][l], CliqueId{c + 1, l + 1});
  }
  return d;
}

std::optional<CliqueId> CliqueDictionary::lookup(const Term& t) const {
  auto it = member_ids.find(t);
  if (it == member_ids.end()) return std::nullopt;
  return it->second;
}

const Term& CliqueDictionary::representative(uint32_t clique_id) const {
  return clique(clique_id).front();
}

const std::vector<Term>& CliqueDictionary::clique(uint32_t clique_id) const {
  if (clique_id == 0 || clique_id > members.size())
    throw DataError("no clique " + std::to_string(clique_id));
  return members[clique_id - 1];
}

uint64_t CliqueDictionary::materialized_count() const {
  uint64_t total = 0;
  for (const auto& c : members) total += uint64_t(c.size()) * c.size();
  return total;
}

void materialize_sameas(const CliqueDictionary& d,
                        const std::function<void(const Triple&)>& sink) {
  const Term same_as = Term::iri(vocab::kOwlSameAs);
  for (const auto& clique : d.members)
    for (const Term& a : clique)
      for (const Term& b : clique) sink(Triple{a, same_as, b});
}

std::vector<Triple> materialize_sameas(const CliqueDictionary& d) {
  std::vector<Triple> out;
  out.reserve(d.materialized_count());
  materialize_sameas(d, [&](const Triple& t) { out.push_back(t); });
  return out;
}

void save_cliques(const CliqueDictionary& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "litemat-cliques v1\n";
  for (uint32_t c = 0; c < d.members.size(); ++c)
    for (uint32_t l = 0; l < d.members[c].size(); ++l)
      out << serialize_term(d.members[c][l]) << "\t" << (c + 1) << "\t"
          << (l + 1) << "\n";
}

CliqueDictionary load_cliques(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw CorruptDictionary("empty file");
  if (header.rfind("litemat-cliques", 0) != 0)
    throw CorruptDictionary("not a clique dictionary: " + path);
  if (header != "litemat-cliques v1")
    throw VersionMismatch("unsupported clique dictionary header: " + header);

  CliqueDictionary d;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw CorruptDictionary("bad row at line " + std::to_string(line_no));
    Term term;
    uint32_t clique = 0, local = 0;
    try {
      term = parse_term(line.substr(0, t1));
      clique = static_cast<uint32_t>(std::stoul(line.substr(t1 + 1, t2 - t1 - 1)));
      local = static_cast<uint32_t>(std::stoul(line.substr(t2 + 1)));
    } catch (const std::exception&) {
      throw CorruptDictionary("bad row at line " + std::to_string(line_no));
    }
    if (clique == 0 || local == 0)
      throw CorruptDictionary("ids start at 1, line " + std::to_string(line_no));
    if (clique > d.members.size()) d.members.resize(clique);
    auto& group = d.members[clique - 1];
    if (local != group.size() + 1)
      throw CorruptDictionary("local ids must be contiguous, line " +
                              std::to_string(line_no));
    group.push_back(term);
    d.member_ids.emplace(std::move(term), CliqueId{clique, local});
  }
  for (size_t c = 0; c < d.members.size(); ++c)
    if (d.members[c].size() < 2)
      throw CorruptDictionary("clique " + std::to_string(c + 1) +
                              " has fewer than two members");
  return d;
}

}  // namespace rsr
