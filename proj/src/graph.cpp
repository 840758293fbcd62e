#include "hinwalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "hinwalk/errors.hpp"

namespace hinwalk {

// ---------------------------------------------------------------- Vocabulary

std::int32_t Vocabulary::intern(std::string_view name) {
  std::string key(name);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::int32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocabulary::at(std::string_view name) const {
  auto id = find(name);
  if (!id) throw DataError("unknown name '" + std::string(name) + "'");
  return *id;
}

// ------------------------------------------------------------- InstanceGraph

InstanceGraph InstanceGraph::build(Vocabulary entities, Vocabulary types, Vocabulary relations,
                                   std::vector<std::vector<TypeId>> type_map,
                                   std::vector<Triple> triples, bool augmented) {
  InstanceGraph g;
  g.entity_vocab_ = std::move(entities);
  g.type_vocab_ = std::move(types);
  g.relation_vocab_ = std::move(relations);
  g.type_map_ = std::move(type_map);
  g.augmented_ = augmented;
  if (g.type_map_.size() < g.entity_vocab_.size()) g.type_map_.resize(g.entity_vocab_.size());
  if (g.type_map_.size() != g.entity_vocab_.size())
    throw DataError("type map covers more entities than the entity vocabulary");
  if (augmented && g.relation_vocab_.size() % 2 != 0)
    throw DataError("augmented graph must have an even relation count");

  const auto n_types = static_cast<TypeId>(g.type_vocab_.size());
  for (auto& ts : g.type_map_) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (TypeId t : ts)
      if (t < 0 || t >= n_types) throw DataError("type id out of range");
  }

  const auto n_rel = static_cast<RelationId>(g.relation_vocab_.size());
  const auto n_ent = static_cast<EntityId>(g.type_map_.size());
  for (const Triple& tr : triples) {
    if (tr.relation < 0 || tr.relation >= n_rel) throw DataError("relation id out of range");
    for (EntityId e : {tr.head, tr.tail}) {
      if (e < 0 || e >= n_ent) throw DataError("entity id out of range");
      if (g.type_map_[static_cast<std::size_t>(e)].empty())
        throw DataError("entity '" + g.entity_vocab_.name(e) + "' appears in a triple but has no type");
    }
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  g.triples_ = std::move(triples);
  g.index();
  return g;
}

void InstanceGraph::index() {
  num_present_ = 0;
  members_.assign(type_vocab_.size(), {});
  for (std::size_t e = 0; e < type_map_.size(); ++e) {
    if (type_map_[e].empty()) continue;
    ++num_present_;
    for (TypeId t : type_map_[e]) members_[static_cast<std::size_t>(t)].push_back(static_cast<EntityId>(e));
  }

  relation_pairs_.assign(relation_vocab_.size(), {});
  for (const Triple& tr : triples_)
    relation_pairs_[static_cast<std::size_t>(tr.relation)].push_back({tr.head, tr.tail});
  for (auto& ps : relation_pairs_) std::sort(ps.begin(), ps.end());

  // triples_ is sorted by (head, relation, tail), which is exactly CSR order.
  out_offsets_.assign(type_map_.size() + 1, 0);
  tails_.clear();
  tails_.reserve(triples_.size());
  for (const Triple& tr : triples_) {
    ++out_offsets_[static_cast<std::size_t>(tr.head) + 1];
    tails_.push_back(tr.tail);
  }
  for (std::size_t i = 1; i < out_offsets_.size(); ++i) out_offsets_[i] += out_offsets_[i - 1];
}

bool InstanceGraph::has_entity(EntityId e) const {
  return e >= 0 && static_cast<std::size_t>(e) < type_map_.size() &&
         !type_map_[static_cast<std::size_t>(e)].empty();
}

std::vector<EntityId> InstanceGraph::entities() const {
  std::vector<EntityId> out;
  out.reserve(num_present_);
  for (std::size_t e = 0; e < type_map_.size(); ++e)
    if (!type_map_[e].empty()) out.push_back(static_cast<EntityId>(e));
  return out;
}

std::span<const TypeId> InstanceGraph::types_of(EntityId e) const {
  return type_map_.at(static_cast<std::size_t>(e));
}

bool InstanceGraph::has_type(EntityId e, TypeId t) const {
  auto ts = types_of(e);
  return std::binary_search(ts.begin(), ts.end(), t);
}

std::span<const EntityId> InstanceGraph::members(TypeId t) const {
  return members_.at(static_cast<std::size_t>(t));
}

bool InstanceGraph::contains(const Triple& tr) const {
  return std::binary_search(triples_.begin(), triples_.end(), tr);
}

const PairSet& InstanceGraph::relation_pairs(RelationId r) const {
  return relation_pairs_.at(static_cast<std::size_t>(r));
}

std::span<const Triple> InstanceGraph::out_edges(EntityId e) const {
  auto i = static_cast<std::size_t>(e);
  return {triples_.data() + out_offsets_.at(i), triples_.data() + out_offsets_.at(i + 1)};
}

std::span<const EntityId> InstanceGraph::successors(EntityId e, RelationId r) const {
  auto i = static_cast<std::size_t>(e);
  const Triple* first = triples_.data() + out_offsets_.at(i);
  const Triple* last = triples_.data() + out_offsets_.at(i + 1);
  auto by_rel = [](const Triple& a, const Triple& b) { return a.relation < b.relation; };
  Triple key{e, r, 0};
  auto lo = std::lower_bound(first, last, key, by_rel);
  auto hi = std::upper_bound(lo, last, key, by_rel);
  auto off = static_cast<std::size_t>(lo - triples_.data());
  return {tails_.data() + off, static_cast<std::size_t>(hi - lo)};
}

std::size_t InstanceGraph::base_relation_count() const {
  return augmented_ ? relation_vocab_.size() / 2 : relation_vocab_.size();
}

RelationId InstanceGraph::inverse(RelationId r) const {
  if (!augmented_) throw ContractError("inverse() on a graph without inverse relations");
  const auto half = static_cast<RelationId>(base_relation_count());
  return r < half ? r + half : r - half;
}

// --------------------------------------------------------------- SchemaGraph

SchemaGraph::SchemaGraph(std::size_t num_types, std::size_t num_relations,
                         std::vector<SchemaEdge> edges, bool augmented)
    : num_types_(num_types), num_relations_(num_relations), augmented_(augmented),
      edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  offsets_.assign(num_types_ + 1, 0);
  for (const SchemaEdge& e : edges_) {
    if (e.src < 0 || static_cast<std::size_t>(e.src) >= num_types_ || e.dst < 0 ||
        static_cast<std::size_t>(e.dst) >= num_types_)
      throw DataError("schema edge type id out of range");
    if (e.relation < 0 || static_cast<std::size_t>(e.relation) >= num_relations_)
      throw DataError("schema edge relation id out of range");
    ++offsets_[static_cast<std::size_t>(e.src) + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::span<const SchemaEdge> SchemaGraph::outgoing(TypeId t) const {
  auto i = static_cast<std::size_t>(t);
  return {edges_.data() + offsets_.at(i), edges_.data() + offsets_.at(i + 1)};
}

bool SchemaGraph::has_edge(const SchemaEdge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

// ------------------------------------------------------------------- loading

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Calls fn(fields, line_no) for every data row with exactly `arity` fields.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t arity, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != arity)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(arity) + " tab-separated fields, got " +
                           std::to_string(fields.size()));
    for (auto f : fields)
      if (f.empty()) throw ParseError(source, line_no, "empty field");
    fn(fields, line_no);
  }
}

}  // namespace

InstanceGraph load_instance_graph(std::istream& triples_in, std::istream& types_in,
                                  const std::string& triples_name, const std::string& types_name) {
  Vocabulary entities, types, relations;
  std::vector<Triple> triples;
  for_each_row(triples_in, 3, triples_name, [&](const auto& f, std::size_t) {
    Triple tr;
    tr.head = entities.intern(f[0]);
    tr.relation = relations.intern(f[1]);
    tr.tail = entities.intern(f[2]);
    triples.push_back(tr);
  });
  std::vector<std::vector<TypeId>> type_map;
  for_each_row(types_in, 2, types_name, [&](const auto& f, std::size_t) {
    auto e = static_cast<std::size_t>(entities.intern(f[0]));
    if (type_map.size() <= e) type_map.resize(e + 1);
    type_map[e].push_back(types.intern(f[1]));
  });
  type_map.resize(entities.size());
  for (const Triple& tr : triples)
    for (EntityId e : {tr.head, tr.tail})
      if (type_map[static_cast<std::size_t>(e)].empty())
        throw DataError("entity '" + entities.name(e) + "' appears in " + triples_name +
                        " but has no type in " + types_name);
  return InstanceGraph::build(std::move(entities), std::move(types), std::move(relations),
                              std::move(type_map), std::move(triples));
}

InstanceGraph load_instance_graph_files(const std::string& triples_path,
                                        const std::string& types_path) {
  std::ifstream tin(triples_path);
  if (!tin) throw DataError("cannot open triples file '" + triples_path + "'");
  std::ifstream yin(types_path);
  if (!yin) throw DataError("cannot open types file '" + types_path + "'");
  return load_instance_graph(tin, yin, triples_path, types_path);
}

void write_triples(std::ostream& out, const InstanceGraph& g) {
  const auto base = static_cast<RelationId>(g.base_relation_count());
  for (const Triple& tr : g.triples()) {
    if (tr.relation >= base) continue;  // inverses are re-derived on load
    out << g.entity_vocab().name(tr.head) << '\t' << g.relation_vocab().name(tr.relation) << '\t'
        << g.entity_vocab().name(tr.tail) << '\n';
  }
}

void write_types(std::ostream& out, const InstanceGraph& g) {
  for (EntityId e : g.entities())
    for (TypeId t : g.types_of(e))
      out << g.entity_vocab().name(e) << '\t' << g.type_vocab().name(t) << '\n';
}

SchemaGraph load_schema_graph(std::istream& in, const InstanceGraph& g, const std::string& name) {
  std::vector<SchemaEdge> edges;
  for_each_row(in, 3, name, [&](const auto& f, std::size_t line_no) {
    auto src = g.type_vocab().find(f[0]);
    auto rel = g.relation_vocab().find(f[1]);
    auto dst = g.type_vocab().find(f[2]);
    if (!src || !rel || !dst) throw ParseError(name, line_no, "unknown type or relation name");
    edges.push_back({*src, *rel, *dst});
  });
  return SchemaGraph(g.num_types(), g.num_relations(), std::move(edges), g.augmented());
}

// ------------------------------------------------------------------- surgery

SchemaGraph derive_schema_graph(const InstanceGraph& g) {
  std::vector<SchemaEdge> edges;
  for (const Triple& tr : g.triples())
    for (TypeId th : g.types_of(tr.head))
      for (TypeId tt : g.types_of(tr.tail)) edges.push_back({th, tr.relation, tt});
  return SchemaGraph(g.num_types(), g.num_relations(), std::move(edges), g.augmented());
}

InstanceGraph add_inverse_relations(const InstanceGraph& g) {
  if (g.augmented()) throw ContractError("graph already has inverse relations");
  Vocabulary relations = g.relation_vocab();
  const auto base = static_cast<RelationId>(relations.size());
  for (RelationId r = 0; r < base; ++r) {
    std::string inv = relations.name(r) + std::string(kInverseSuffix);
    if (relations.find(inv)) throw DataError("relation name '" + inv + "' already in use");
    relations.intern(inv);
  }
  std::vector<Triple> triples(g.triples().begin(), g.triples().end());
  triples.reserve(2 * triples.size());
  for (const Triple& tr : g.triples()) triples.push_back({tr.tail, tr.relation + base, tr.head});

  std::vector<std::vector<TypeId>> type_map(g.entity_id_count());
  for (std::size_t e = 0; e < type_map.size(); ++e) {
    auto ts = g.types_of(static_cast<EntityId>(e));
    type_map[e].assign(ts.begin(), ts.end());
  }
  return InstanceGraph::build(g.entity_vocab(), g.type_vocab(), std::move(relations),
                              std::move(type_map), std::move(triples), true);
}

std::pair<InstanceGraph, SchemaGraph> add_inverse_relations(const InstanceGraph& g,
                                                            const SchemaGraph& s) {
  if (s.augmented()) throw ContractError("schema already has inverse relations");
  InstanceGraph ag = add_inverse_relations(g);
  const auto base = static_cast<RelationId>(g.num_relations());
  std::vector<SchemaEdge> edges(s.edges().begin(), s.edges().end());
  for (const SchemaEdge& e : s.edges()) edges.push_back({e.dst, e.relation + base, e.src});
  SchemaGraph as(s.num_types(), ag.num_relations(), std::move(edges), true);
  return {std::move(ag), std::move(as)};
}

namespace {

std::vector<std::vector<TypeId>> copy_type_map(const InstanceGraph& g) {
  std::vector<std::vector<TypeId>> type_map(g.entity_id_count());
  for (std::size_t e = 0; e < type_map.size(); ++e) {
    auto ts = g.types_of(static_cast<EntityId>(e));
    type_map[e].assign(ts.begin(), ts.end());
  }
  return type_map;
}

}  // namespace

InstanceGraph remove_triples(const InstanceGraph& g, std::span<const Triple> facts,
                             std::size_t* n_ignored) {
  std::vector<Triple> drop;
  std::size_t ignored = 0;
  for (const Triple& tr : facts) {
    if (!g.contains(tr)) {
      ++ignored;
      continue;
    }
    drop.push_back(tr);
    if (g.augmented()) drop.push_back({tr.tail, g.inverse(tr.relation), tr.head});
  }
  if (n_ignored) *n_ignored = ignored;
  std::sort(drop.begin(), drop.end());
  std::vector<Triple> kept;
  kept.reserve(g.triples().size());
  std::set_difference(g.triples().begin(), g.triples().end(), drop.begin(), drop.end(),
                      std::back_inserter(kept));
  return InstanceGraph::build(g.entity_vocab(), g.type_vocab(), g.relation_vocab(),
                              copy_type_map(g), std::move(kept), g.augmented());
}

InstanceGraph remove_entities(const InstanceGraph& g, std::span<const EntityId> nodes) {
  std::vector<bool> removed(g.entity_id_count(), false);
  for (EntityId e : nodes)
    if (e >= 0 && static_cast<std::size_t>(e) < removed.size()) removed[static_cast<std::size_t>(e)] = true;
  std::vector<Triple> kept;
  kept.reserve(g.triples().size());
  for (const Triple& tr : g.triples())
    if (!removed[static_cast<std::size_t>(tr.head)] && !removed[static_cast<std::size_t>(tr.tail)])
      kept.push_back(tr);
  auto type_map = copy_type_map(g);
  for (std::size_t e = 0; e < type_map.size(); ++e)
    if (removed[e]) type_map[e].clear();
  return InstanceGraph::build(g.entity_vocab(), g.type_vocab(), g.relation_vocab(),
                              std::move(type_map), std::move(kept), g.augmented());
}

// ----------------------------------------------------------------- query set

std::vector<TypePairSupport> type_pairs_for_relation(const InstanceGraph& g, const SchemaGraph& s,
                                                     RelationId r_q) {
  if (r_q < 0 || static_cast<std::size_t>(r_q) >= g.num_relations())
    throw ContractError("relation id out of range");
  std::map<std::pair<TypeId, TypeId>, std::size_t> counts;
  for (const EntityPair& p : g.relation_pairs(r_q))
    for (TypeId th : g.types_of(p.head))
      for (TypeId tt : g.types_of(p.tail)) ++counts[{th, tt}];
  std::vector<TypePairSupport> out;
  for (const auto& [key, n] : counts)
    if (s.has_edge({key.first, r_q, key.second})) out.push_back({key.first, key.second, n});
  std::stable_sort(out.begin(), out.end(),
                   [](const TypePairSupport& a, const TypePairSupport& b) { return a.count > b.count; });
  return out;
}

std::vector<TypePairSupport> narrow_query_set(std::span<const TypePairSupport> pairs,
                                              double threshold) {
  if (pairs.empty()) throw ContractError("narrow_query_set: empty type-pair list");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ConfigError("narrow_query_set: threshold must be in (0, 1]");
  std::vector<TypePairSupport> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::pair(a.src_type, a.tgt_type) < std::pair(b.src_type, b.tgt_type);
  });
  std::size_t total = 0;
  for (const auto& p : sorted) total += p.count;
  const double goal = threshold * static_cast<double>(total);
  std::vector<TypePairSupport> out;
  std::size_t running = 0;
  for (const auto& p : sorted) {
    out.push_back(p);
    running += p.count;
    if (static_cast<double>(running) >= goal) break;
  }
  return out;
}

std::vector<Query> queries_for(RelationId r_q, std::span<const TypePairSupport> pairs) {
  std::vector<Query> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.src_type, r_q, p.tgt_type});
  return out;
}

}  // namespace hinwalk
