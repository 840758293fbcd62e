#pragma once

// Two-view heterogeneous information network: the entity-level instance graph
// and the type-level schema graph derived from it.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hinwalk {

using EntityId = std::int32_t;
using TypeId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;
};

struct EntityPair {
  EntityId head = 0;
  EntityId tail = 0;

  auto operator<=>(const EntityPair&) const = default;
};

// Sorted, duplicate-free list of ordered entity pairs.
using PairSet = std::vector<EntityPair>;

// Dense string <-> id map; ids are assigned from 0 in first-appearance order.
class Vocabulary {
 public:
  std::int32_t intern(std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  std::int32_t at(std::string_view name) const;  // throws DataError when absent
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// Suffix marking the inverse of a relation in the vocabulary.
inline constexpr std::string_view kInverseSuffix = "\u207B\u00B9";

class InstanceGraph {
 public:
  InstanceGraph() = default;

  // Validates and indexes. Every entity id in `triples` must be present with at
  // least one type; `type_map` is indexed by entity id, an empty type list
  // marks an absent entity. Duplicate triples are dropped.
  static InstanceGraph build(Vocabulary entities, Vocabulary types, Vocabulary relations,
                             std::vector<std::vector<TypeId>> type_map, std::vector<Triple> triples,
                             bool augmented = false);

  const Vocabulary& entity_vocab() const { return entity_vocab_; }
  const Vocabulary& type_vocab() const { return type_vocab_; }
  const Vocabulary& relation_vocab() const { return relation_vocab_; }

  // Size of the entity id space (includes removed entities).
  std::size_t entity_id_count() const { return type_map_.size(); }
  std::size_t num_entities() const { return num_present_; }
  std::size_t num_types() const { return type_vocab_.size(); }
  std::size_t num_relations() const { return relation_vocab_.size(); }

  bool has_entity(EntityId e) const;
  std::vector<EntityId> entities() const;
  std::span<const TypeId> types_of(EntityId e) const;
  bool has_type(EntityId e, TypeId t) const;
  std::span<const EntityId> members(TypeId t) const;

  std::span<const Triple> triples() const { return triples_; }
  bool contains(const Triple& tr) const;

  // Distinct (head, tail) pairs connected by relation r, sorted.
  const PairSet& relation_pairs(RelationId r) const;
  // Tails of relation r out of e, sorted.
  std::span<const EntityId> successors(EntityId e, RelationId r) const;
  // All triples with head e, sorted by relation then tail.
  std::span<const Triple> out_edges(EntityId e) const;

  bool augmented() const { return augmented_; }
  // Number of relations before inverse augmentation.
  std::size_t base_relation_count() const;
  RelationId inverse(RelationId r) const;  // requires augmented()

 private:
  void index();

  Vocabulary entity_vocab_;
  Vocabulary type_vocab_;
  Vocabulary relation_vocab_;
  std::vector<std::vector<TypeId>> type_map_;
  std::vector<Triple> triples_;
  bool augmented_ = false;

  std::size_t num_present_ = 0;
  std::vector<std::vector<EntityId>> members_;
  std::vector<PairSet> relation_pairs_;
  std::vector<std::size_t> out_offsets_;  // into triples_, which is head-sorted
  std::vector<EntityId> tails_;           // tails_[i] == triples_[i].tail
};

struct SchemaEdge {
  TypeId src = 0;
  RelationId relation = 0;
  TypeId dst = 0;

  auto operator<=>(const SchemaEdge&) const = default;
};

class SchemaGraph {
 public:
  SchemaGraph() = default;
  SchemaGraph(std::size_t num_types, std::size_t num_relations, std::vector<SchemaEdge> edges,
              bool augmented = false);

  std::size_t num_types() const { return num_types_; }
  std::size_t num_relations() const { return num_relations_; }
  bool augmented() const { return augmented_; }

  std::span<const SchemaEdge> edges() const { return edges_; }
  // Outgoing edges of t in (relation, dst) order.
  std::span<const SchemaEdge> outgoing(TypeId t) const;
  bool has_edge(const SchemaEdge& e) const;

 private:
  std::size_t num_types_ = 0;
  std::size_t num_relations_ = 0;
  bool augmented_ = false;
  std::vector<SchemaEdge> edges_;
  std::vector<std::size_t> offsets_;
};

// A relation query r_q(src_type, tgt_type) posed to the agent.
struct Query {
  TypeId src_type = 0;
  RelationId relation = 0;
  TypeId tgt_type = 0;

  auto operator<=>(const Query&) const = default;
};

struct TypePairSupport {
  TypeId src_type = 0;
  TypeId tgt_type = 0;
  std::size_t count = 0;

  bool operator==(const TypePairSupport&) const = default;
};

// Reads tab-separated triples and entity types. `#` lines and blank lines are
// skipped; repeated type lines accumulate.
InstanceGraph load_instance_graph(std::istream& triples, std::istream& types,
                                  const std::string& triples_name = "triples",
                                  const std::string& types_name = "types");
InstanceGraph load_instance_graph_files(const std::string& triples_path,
                                        const std::string& types_path);

// Writes the graph back in the same TSV formats (present entities only).
void write_triples(std::ostream& out, const InstanceGraph& g);
void write_types(std::ostream& out, const InstanceGraph& g);

SchemaGraph derive_schema_graph(const InstanceGraph& g);

// Reads `src<TAB>relation<TAB>dst` schema edges named against g's vocabularies.
SchemaGraph load_schema_graph(std::istream& in, const InstanceGraph& g,
                              const std::string& name = "schema");

// Adds inv(r) for every relation at both levels; ids R..2R-1 are the inverses.
std::pair<InstanceGraph, SchemaGraph> add_inverse_relations(const InstanceGraph& g,
                                                            const SchemaGraph& s);
InstanceGraph add_inverse_relations(const InstanceGraph& g);

// Removes the given facts (and their inverses when augmented). Facts absent
// from g are ignored and counted in `n_ignored`.
InstanceGraph remove_triples(const InstanceGraph& g, std::span<const Triple> facts,
                             std::size_t* n_ignored = nullptr);

InstanceGraph remove_entities(const InstanceGraph& g, std::span<const EntityId> nodes);

std::vector<TypePairSupport> type_pairs_for_relation(const InstanceGraph& g, const SchemaGraph& s,
                                                     RelationId r_q);

// Greedy count-descending prefix whose cumulative count first reaches
// threshold * total.
std::vector<TypePairSupport> narrow_query_set(std::span<const TypePairSupport> pairs,
                                              double threshold);

std::vector<Query> queries_for(RelationId r_q, std::span<const TypePairSupport> pairs);

}  // namespace hinwalk
