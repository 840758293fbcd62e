#pragma once

// Uninformed meta-path generators: uniform random walks on the schema and
// exhaustive enumeration of bounded schema paths.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hinwalk/env.hpp"
#include "hinwalk/graph.hpp"
#include "hinwalk/metapath.hpp"

namespace hinwalk {

struct SearchBudget {
  std::size_t attempts = 1;
  int multiplier = 1;  // 1, 5 or 10 in the scaled-budget comparison

  std::size_t total() const { return attempts * static_cast<std::size_t>(multiplier); }
};

// total() walks from q.src_type, each choosing uniformly among outgoing schema
// edges and stopping at the first arrival at q.tgt_type (after >= 1 hop), at a
// dead end, or after max_hops hops. The one-hop restatement of the query is
// discarded. Returns distinct meta-paths sorted by canonical encoding.
std::vector<MetaPath> random_walk_metapaths(const SchemaGraph& s, const Query& q,
                                            const SearchBudget& budget, int max_hops,
                                            std::mt19937_64& rng);

// Number of schema paths src -> tgt with 1..max_hops hops, saturating at
// `cap + 1`.
std::size_t count_schema_paths(const SchemaGraph& s, const Query& q, int max_hops, std::size_t cap);

// Every schema path src -> tgt of 1..max_hops hops except the restatement.
// Throws ConfigError when count_schema_paths exceeds `cap`.
std::vector<MetaPath> enumerate_metapaths(const SchemaGraph& s, const Query& q, int max_hops,
                                          std::size_t cap = 10'000'000);

}  // namespace hinwalk
