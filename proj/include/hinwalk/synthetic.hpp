#pragma once

// Generators for small HINs with known structure: the shipped toy network,
// planted meta-paths among decoys, and random graphs for oracle comparisons.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/metapath.hpp"

namespace hinwalk {

// Incremental construction by name.
class HinBuilder {
 public:
  TypeId type(std::string_view name) { return types_.intern(name); }
  RelationId relation(std::string_view name) { return relations_.intern(name); }
  EntityId entity(std::string_view name, std::initializer_list<TypeId> types);
  EntityId entity(std::string_view name, const std::vector<TypeId>& types);
  void triple(EntityId h, RelationId r, EntityId t) { triples_.push_back({h, r, t}); }
  void triple(std::string_view h, std::string_view r, std::string_view t);

  std::size_t num_triples() const { return triples_.size(); }
  InstanceGraph build() const;

 private:
  Vocabulary entities_, types_, relations_;
  std::vector<std::vector<TypeId>> type_map_;
  std::vector<Triple> triples_;
};

// Same content as data/toy: 9 entities, 11 triples, 5 types.
InstanceGraph make_toy_graph();

// Citizenship example: `citizens` Person-isCitizenOf->Germany pairs, of whom
// `citizen_graduates` graduated from a German university, plus
// `other_graduates` German-university graduates with no citizenship edge.
InstanceGraph make_citizenship_graph(int citizens = 200, int citizen_graduates = 150,
                                     int other_graduates = 100);

struct PlantedFixture {
  InstanceGraph graph;
  SchemaGraph schema;
  std::vector<RelationId> targets;    // relations to learn
  std::vector<MetaPath> planted;      // planted[i] explains targets[i]
  std::vector<Query> queries;         // queries[i] asks targets[i]
};

// One target Src-q->Tgt over `pairs` entity pairs, explained exactly by
// Src -a-> A -b-> Tgt, plus `decoys` two-hop routes Src -x_i-> M_i -y_i-> Tgt
// each joining `decoy_pairs` pairs of which exactly one is a q pair.
PlantedFixture make_convergence_fixture(int pairs = 50, int decoys = 20, int decoy_pairs = 10,
                                        std::uint64_t seed = 7);

// Schema-rich graph: `n_types` types and `n_noise_relations` noise relations
// whose schema edges each have a few private instances that never chain, and
// `n_targets` target relations explained by planted three-hop chains.
PlantedFixture make_schema_complex_fixture(int n_types = 30, int n_noise_relations = 20,
                                           int out_degree = 8, int n_targets = 2,
                                           std::uint64_t seed = 11);

// `n_relations` target relations Q_i(S_i, T_i), each explained by a planted
// two-hop path S_i -P_i-> M_i -P'_i-> T_i; shared decoy relations route every
// S_i through `n_decoys` hub types to every T_k with near-zero confidence.
PlantedFixture make_transfer_fixture(int n_relations = 8, int n_decoys = 8, int pairs = 30,
                                     std::uint64_t seed = 5);

struct RandomHinSpec {
  int max_entities = 200;
  int max_types = 10;
  int max_relations = 8;
  int max_triples = 400;
  double multi_type_rate = 0.2;
};

// Random typed multigraph whose relations connect a few fixed type pairs.
InstanceGraph make_random_hin(const RandomHinSpec& spec, std::uint64_t seed);

}  // namespace hinwalk
