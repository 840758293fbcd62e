#include "hinwalk/baselines.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hinwalk/errors.hpp"

namespace hinwalk {

namespace {

bool encoding_less(const MetaPath& a, const MetaPath& b) {
  return canonical_encoding(a) < canonical_encoding(b);
}

}  // namespace

std::vector<MetaPath> random_walk_metapaths(const SchemaGraph& s, const Query& q,
                                            const SearchBudget& budget, int max_hops,
                                            std::mt19937_64& rng) {
  if (budget.attempts < 1 || budget.multiplier < 1) throw ConfigError("search budget must be >= 1");
  if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
  std::vector<MetaPath> found;
  for (std::size_t a = 0; a < budget.total(); ++a) {
    MetaPath m;
    m.types.push_back(q.src_type);
    TypeId cur = q.src_type;
    bool arrived = false;
    for (int hop = 0; hop < max_hops; ++hop) {
      auto out = s.outgoing(cur);
      if (out.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
      const SchemaEdge& e = out[pick(rng)];
      m.relations.push_back(e.relation);
      m.types.push_back(e.dst);
      cur = e.dst;
      if (cur == q.tgt_type) {
        arrived = true;
        break;
      }
    }
    if (arrived && !is_query_restatement(m, q)) found.push_back(std::move(m));
  }
  std::sort(found.begin(), found.end(), encoding_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

std::size_t count_schema_paths(const SchemaGraph& s, const Query& q, int max_hops, std::size_t cap) {
  const std::size_t limit = cap + 1;
  auto sat_add = [limit](std::size_t a, std::size_t b) { return std::min(limit, a + b); };
  std::vector<std::size_t> ways(s.num_types(), 0);
  ways[static_cast<std::size_t>(q.src_type)] = 1;
  std::size_t total = 0;
  for (int hop = 0; hop < max_hops; ++hop) {
    std::vector<std::size_t> next(s.num_types(), 0);
    for (const SchemaEdge& e : s.edges()) {
      auto src = static_cast<std::size_t>(e.src);
      if (ways[src]) next[static_cast<std::size_t>(e.dst)] = sat_add(next[static_cast<std::size_t>(e.dst)], ways[src]);
    }
    ways = std::move(next);
    total = sat_add(total, ways[static_cast<std::size_t>(q.tgt_type)]);
  }
  return total;
}

std::vector<MetaPath> enumerate_metapaths(const SchemaGraph& s, const Query& q, int max_hops,
                                          std::size_t cap) {
  if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
  if (count_schema_paths(s, q, max_hops, cap) > cap)
    throw ConfigError("enumeration refused: more than " + std::to_string(cap) +
                      " schema paths within " + std::to_string(max_hops) + " hops");
  std::vector<MetaPath> out;
  MetaPath m;
  m.types.push_back(q.src_type);
  auto dfs = [&](auto&& self, TypeId cur) -> void {
    if (static_cast<int>(m.relations.size()) == max_hops) return;
    for (const SchemaEdge& e : s.outgoing(cur)) {
      m.relations.push_back(e.relation);
      m.types.push_back(e.dst);
      if (e.dst == q.tgt_type && !is_query_restatement(m, q)) out.push_back(m);
      self(self, e.dst);
      m.relations.pop_back();
      m.types.pop_back();
    }
  };
  dfs(dfs, q.src_type);
  std::sort(out.begin(), out.end(), encoding_less);
  return out;
}

}  // namespace hinwalk
