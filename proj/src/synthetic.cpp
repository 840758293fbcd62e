#include "hinwalk/synthetic.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <random>
#include <set>
#include <string>

#include "hinwalk/errors.hpp"

namespace hinwalk {

EntityId HinBuilder::entity(std::string_view name, std::initializer_list<TypeId> types) {
  return entity(name, std::vector<TypeId>(types));
}

EntityId HinBuilder::entity(std::string_view name, const std::vector<TypeId>& types) {
  EntityId e = entities_.intern(name);
  if (type_map_.size() <= static_cast<std::size_t>(e)) type_map_.resize(static_cast<std::size_t>(e) + 1);
  auto& ts = type_map_[static_cast<std::size_t>(e)];
  for (TypeId t : types)
    if (std::find(ts.begin(), ts.end(), t) == ts.end()) ts.push_back(t);
  return e;
}

void HinBuilder::triple(std::string_view h, std::string_view r, std::string_view t) {
  triple(entities_.at(h), relation(r), entities_.at(t));
}

InstanceGraph HinBuilder::build() const {
  auto type_map = type_map_;
  type_map.resize(entities_.size());
  return InstanceGraph::build(entities_, types_, relations_, std::move(type_map), triples_);
}

InstanceGraph make_toy_graph() {
  HinBuilder b;
  const TypeId person = b.type("Person");
  const TypeId scientist = b.type("Scientist");
  const TypeId university = b.type("University");
  const TypeId city = b.type("City");
  const TypeId country = b.type("Country");
  b.entity("MaxPlanck", {person, scientist});
  b.entity("MarieCurie", {person, scientist});
  b.entity("JohnDoe", {person});
  b.entity("UnivMunich", {university});
  b.entity("UnivParis", {university});
  b.entity("Kiel", {city});
  b.entity("Paris", {city});
  b.entity("Germany", {country});
  b.entity("France", {country});
  b.triple("MaxPlanck", "BornIn", "Kiel");
  b.triple("Kiel", "LocatedIn", "Germany");
  b.triple("MaxPlanck", "GraduatedFrom", "UnivMunich");
  b.triple("UnivMunich", "LocatedIn", "Germany");
  b.triple("MaxPlanck", "WorksAt", "UnivMunich");
  b.triple("MaxPlanck", "isCitizenOf", "Germany");
  b.triple("MarieCurie", "GraduatedFrom", "UnivParis");
  b.triple("UnivParis", "LocatedIn", "France");
  b.triple("MarieCurie", "isCitizenOf", "France");
  b.triple("MarieCurie", "BornIn", "Paris");
  b.triple("JohnDoe", "GraduatedFrom", "UnivMunich");
  return b.build();
}

InstanceGraph make_citizenship_graph(int citizens, int citizen_graduates, int other_graduates) {
  if (citizens < 0 || citizen_graduates < 0 || citizen_graduates > citizens || other_graduates < 0)
    throw ConfigError("invalid citizenship example sizes");
  HinBuilder b;
  const TypeId person = b.type("Person");
  const TypeId university = b.type("University");
  const TypeId country = b.type("Country");
  const RelationId citizen_of = b.relation("isCitizenOf");
  const RelationId graduated = b.relation("GraduatedFrom");
  const RelationId located = b.relation("LocatedIn");
  const EntityId germany = b.entity("Germany", {country});
  std::vector<EntityId> unis;
  for (int u = 0; u < 5; ++u) {
    unis.push_back(b.entity("GermanUniv" + std::to_string(u), {university}));
    b.triple(unis.back(), located, germany);
  }
  for (int i = 0; i < citizens; ++i) {
    EntityId p = b.entity("Citizen" + std::to_string(i), {person});
    b.triple(p, citizen_of, germany);
    if (i < citizen_graduates) b.triple(p, graduated, unis[static_cast<std::size_t>(i) % unis.size()]);
  }
  for (int j = 0; j < other_graduates; ++j) {
    EntityId p = b.entity("Visitor" + std::to_string(j), {person});
    b.triple(p, graduated, unis[static_cast<std::size_t>(j) % unis.size()]);
  }
  return b.build();
}

PlantedFixture make_convergence_fixture(int pairs, int decoys, int decoy_pairs, std::uint64_t seed) {
  if (pairs < 2 || decoys < 0 || decoy_pairs < 1 || decoy_pairs > pairs)
    throw ConfigError("invalid convergence fixture sizes");
  std::mt19937_64 rng(seed);
  HinBuilder b;
  const TypeId src = b.type("Src");
  const TypeId tgt = b.type("Tgt");
  const TypeId mid = b.type("A");
  const RelationId q = b.relation("q");
  const RelationId ra = b.relation("a");
  const RelationId rb = b.relation("b");
  std::vector<EntityId> s, t;
  for (int k = 0; k < pairs; ++k) {
    s.push_back(b.entity("s" + std::to_string(k), {src}));
    t.push_back(b.entity("t" + std::to_string(k), {tgt}));
  }
  for (int k = 0; k < pairs; ++k) {
    EntityId a = b.entity("a" + std::to_string(k), {mid});
    b.triple(s[k], q, t[k]);
    b.triple(s[k], ra, a);
    b.triple(a, rb, t[k]);
  }
  std::uniform_int_distribution<int> pick(0, pairs - 1);
  for (int i = 0; i < decoys; ++i) {
    const std::string tag = std::to_string(i);
    const TypeId m_type = b.type("M" + tag);
    const RelationId x = b.relation("x" + tag);
    const RelationId y = b.relation("y" + tag);
    std::set<std::pair<int, int>> chosen;
    const int u0 = pick(rng);
    chosen.insert({u0, u0});
    while (static_cast<int>(chosen.size()) < decoy_pairs) {
      int u = pick(rng);
      int v = pick(rng);
      if (u != v) chosen.insert({u, v});
    }
    int j = 0;
    for (auto [u, v] : chosen) {
      EntityId m = b.entity("m" + tag + "_" + std::to_string(j++), {m_type});
      b.triple(s[u], x, m);
      b.triple(m, y, t[v]);
    }
  }
  PlantedFixture f;
  f.graph = b.build();
  f.schema = derive_schema_graph(f.graph);
  f.targets = {q};
  f.planted = {MetaPath{{src, mid, tgt}, {ra, rb}}};
  f.queries = {Query{src, q, tgt}};
  return f;
}

PlantedFixture make_schema_complex_fixture(int n_types, int n_noise_relations, int out_degree,
                                           int n_targets, std::uint64_t seed) {
  if (n_types < 4 || n_noise_relations < 1 || out_degree < 1 || n_targets < 1)
    throw ConfigError("invalid schema-complex fixture sizes");
  std::mt19937_64 rng(seed);
  HinBuilder b;
  std::vector<TypeId> types;
  for (int t = 0; t < n_types; ++t) types.push_back(b.type("T" + std::to_string(t)));
  std::vector<RelationId> noise;
  for (int r = 0; r < n_noise_relations; ++r) noise.push_back(b.relation("N" + std::to_string(r)));
  int counter = 0;
  auto fresh = [&](TypeId t) {
    return b.entity("e" + std::to_string(counter++) + "_T" + std::to_string(t), {t});
  };

  std::uniform_int_distribution<int> pick_type(0, n_types - 1);
  std::uniform_int_distribution<int> pick_rel(0, n_noise_relations - 1);
  std::set<std::tuple<int, int, int>> edges;
  for (int src = 0; src < n_types; ++src) {
    int added = 0;
    for (int attempt = 0; added < out_degree && attempt < 100 * out_degree; ++attempt)
      if (edges.insert({src, pick_rel(rng), pick_type(rng)}).second) ++added;
  }
  // Each noise edge gets two instances on private entities, so noise edges
  // are individually valid but never chain.
  for (auto [src, r, dst] : edges)
    for (int k = 0; k < 2; ++k) b.triple(fresh(types[src]), noise[r], fresh(types[dst]));

  PlantedFixture f;
  std::vector<int> order(static_cast<std::size_t>(n_types));
  for (int t = 0; t < n_types; ++t) order[static_cast<std::size_t>(t)] = t;
  std::shuffle(order.begin(), order.end(), rng);
  for (int k = 0; k < n_targets; ++k) {
    const std::string tag = std::to_string(k);
    std::array<TypeId, 4> chain_types;
    for (int h = 0; h < 4; ++h)
      chain_types[static_cast<std::size_t>(h)] = types[order[static_cast<std::size_t>((4 * k + h) % n_types)]];
    std::array<RelationId, 3> hops{b.relation("P" + tag + "a"), b.relation("P" + tag + "b"),
                                   b.relation("P" + tag + "c")};
    const RelationId target = b.relation("Q" + tag);
    for (int c = 0; c < 20; ++c) {
      std::array<EntityId, 4> e;
      for (int h = 0; h < 4; ++h) e[static_cast<std::size_t>(h)] = fresh(chain_types[static_cast<std::size_t>(h)]);
      for (int h = 0; h < 3; ++h) b.triple(e[static_cast<std::size_t>(h)], hops[static_cast<std::size_t>(h)], e[static_cast<std::size_t>(h) + 1]);
      b.triple(e[0], target, e[3]);
    }
    f.targets.push_back(target);
    f.planted.push_back(MetaPath{{chain_types.begin(), chain_types.end()}, {hops.begin(), hops.end()}});
    f.queries.push_back(Query{chain_types[0], target, chain_types[3]});
  }
  f.graph = b.build();
  f.schema = derive_schema_graph(f.graph);
  return f;
}

PlantedFixture make_transfer_fixture(int n_relations, int n_decoys, int pairs, std::uint64_t seed) {
  if (n_relations < 1 || n_decoys < 0 || pairs < 2) throw ConfigError("invalid transfer fixture sizes");
  std::mt19937_64 rng(seed);
  HinBuilder b;
  std::vector<TypeId> s_type, t_type, m_type, hub_type;
  for (int i = 0; i < n_relations; ++i) {
    const std::string tag = std::to_string(i);
    s_type.push_back(b.type("S" + tag));
    t_type.push_back(b.type("T" + tag));
    m_type.push_back(b.type("M" + tag));
  }
  std::vector<RelationId> into_hub, out_of_hub;
  for (int j = 0; j < n_decoys; ++j) {
    const std::string tag = std::to_string(j);
    hub_type.push_back(b.type("H" + tag));
    into_hub.push_back(b.relation("D" + tag));
    out_of_hub.push_back(b.relation("E" + tag));
  }
  std::vector<std::vector<EntityId>> s(static_cast<std::size_t>(n_relations)),
      t(static_cast<std::size_t>(n_relations));
  PlantedFixture f;
  for (int i = 0; i < n_relations; ++i) {
    const std::string tag = std::to_string(i);
    const RelationId target = b.relation("Q" + tag);
    const RelationId p1 = b.relation("P" + tag + "a");
    const RelationId p2 = b.relation("P" + tag + "b");
    auto& si = s[static_cast<std::size_t>(i)];
    auto& ti = t[static_cast<std::size_t>(i)];
    for (int k = 0; k < pairs; ++k) {
      const std::string ek = tag + "_" + std::to_string(k);
      si.push_back(b.entity("s" + ek, {s_type[static_cast<std::size_t>(i)]}));
      ti.push_back(b.entity("t" + ek, {t_type[static_cast<std::size_t>(i)]}));
      EntityId m = b.entity("m" + ek, {m_type[static_cast<std::size_t>(i)]});
      b.triple(si.back(), target, ti.back());
      b.triple(si.back(), p1, m);
      b.triple(m, p2, ti.back());
    }
    f.targets.push_back(target);
    f.planted.push_back(MetaPath{{s_type[static_cast<std::size_t>(i)], m_type[static_cast<std::size_t>(i)],
                                  t_type[static_cast<std::size_t>(i)]},
                                 {p1, p2}});
    f.queries.push_back(Query{s_type[static_cast<std::size_t>(i)], target, t_type[static_cast<std::size_t>(i)]});
  }
  // Hub routes: S_i -D_j-> hub -E_j-> T_k, always joining non-target pairs.
  std::uniform_int_distribution<int> pick(0, pairs - 1);
  int hub_count = 0;
  for (int i = 0; i < n_relations; ++i)
    for (int j = 0; j < n_decoys; ++j)
      for (int k = 0; k < n_relations; ++k) {
        int u = pick(rng);
        int v = pick(rng);
        if (k == i && u == v) v = (v + 1) % pairs;
        EntityId hub = b.entity("hub" + std::to_string(hub_count++), {hub_type[static_cast<std::size_t>(j)]});
        b.triple(s[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)], into_hub[static_cast<std::size_t>(j)], hub);
        b.triple(hub, out_of_hub[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]);
      }
  f.graph = b.build();
  f.schema = derive_schema_graph(f.graph);
  return f;
}

InstanceGraph make_random_hin(const RandomHinSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  HinBuilder b;
  const int n_types = uniform(2, std::max(2, spec.max_types));
  const int n_rel = uniform(1, std::max(1, spec.max_relations));
  const int n_ent = uniform(std::min(20, spec.max_entities), spec.max_entities);
  std::vector<TypeId> types;
  for (int t = 0; t < n_types; ++t) types.push_back(b.type("T" + std::to_string(t)));
  std::vector<std::vector<EntityId>> members(static_cast<std::size_t>(n_types));
  std::bernoulli_distribution extra(spec.multi_type_rate);
  for (int e = 0; e < n_ent; ++e) {
    std::vector<TypeId> ts{types[static_cast<std::size_t>(uniform(0, n_types - 1))]};
    if (extra(rng)) ts.push_back(types[static_cast<std::size_t>(uniform(0, n_types - 1))]);
    EntityId id = b.entity("e" + std::to_string(e), ts);
    for (TypeId t : ts)
      if (std::find(members[static_cast<std::size_t>(t)].begin(), members[static_cast<std::size_t>(t)].end(), id) ==
          members[static_cast<std::size_t>(t)].end())
        members[static_cast<std::size_t>(t)].push_back(id);
  }
  // Each relation links one to three type pairs.
  std::vector<std::vector<std::pair<int, int>>> signature(static_cast<std::size_t>(n_rel));
  std::vector<RelationId> rels;
  for (int r = 0; r < n_rel; ++r) {
    rels.push_back(b.relation("R" + std::to_string(r)));
    const int n_sig = uniform(1, 3);
    for (int k = 0; k < n_sig; ++k) {
      int src = uniform(0, n_types - 1);
      int dst = uniform(0, n_types - 1);
      if (members[static_cast<std::size_t>(src)].empty() || members[static_cast<std::size_t>(dst)].empty()) continue;
      signature[static_cast<std::size_t>(r)].push_back({src, dst});
    }
  }
  const int n_triples = uniform(spec.max_triples / 4, spec.max_triples);
  for (int k = 0; k < n_triples; ++k) {
    const int r = uniform(0, n_rel - 1);
    const auto& sig = signature[static_cast<std::size_t>(r)];
    if (sig.empty()) continue;
    auto [src, dst] = sig[static_cast<std::size_t>(uniform(0, static_cast<int>(sig.size()) - 1))];
    const auto& hs = members[static_cast<std::size_t>(src)];
    const auto& ts = members[static_cast<std::size_t>(dst)];
    b.triple(hs[static_cast<std::size_t>(uniform(0, static_cast<int>(hs.size()) - 1))], rels[static_cast<std::size_t>(r)],
             ts[static_cast<std::size_t>(uniform(0, static_cast<int>(ts.size()) - 1))]);
  }
  return b.build();
}

}  // namespace hinwalk
