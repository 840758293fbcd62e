#pragma once

// Beam-search decoding of the trained policy into meta-paths, confidence
// scoring, max-pooled tail ranking and Hits@K / MRR.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hinwalk/embedding.hpp"
#include "hinwalk/env.hpp"
#include "hinwalk/evaluate.hpp"
#include "hinwalk/policy.hpp"

namespace hinwalk {

struct BeamEntry {
  Trajectory trajectory;
  double log_prob = 0.0;
};

// Keeps the top `width` prefixes by cumulative log-probability after every
// step; ties go to the lexicographically smaller action sequence. Results are
// complete episodes in that same order.
std::vector<BeamEntry> beam_search(const PolicyParams& p, const EmbeddingTable& emb,
                                   const SchemaEnv& env, const Query& q, std::size_t width);

struct ScoredMetaPath {
  MetaPath metapath;
  double coverage = 0.0;
  double confidence = 0.0;
};

struct MinedPathSet {
  RelationId relation = 0;
  std::vector<ScoredMetaPath> entries;  // confidence-descending, duplicate-free
};

// Orders by confidence desc, coverage desc, then canonical encoding.
void sort_mined(MinedPathSet& set);

// Collects arrival-satisfying beam outputs over `queries`, drops the query
// restatement, dedupes and scores against g.
MinedPathSet mine_metapaths(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                            const InstanceGraph& g, RelationId r_q, std::span<const Query> queries,
                            std::size_t width, EvalCache* cache = nullptr);

// Scores an arbitrary meta-path collection for r_q the same way.
MinedPathSet score_metapaths(const InstanceGraph& g, RelationId r_q, std::span<const MetaPath> paths,
                             EvalCache* cache = nullptr);

// `relation<TAB>metapath<TAB>coverage<TAB>confidence`
void write_mined(std::ostream& out, std::span<const MinedPathSet> sets, const InstanceGraph& g);
std::map<RelationId, MinedPathSet> read_mined(std::istream& in, const InstanceGraph& g,
                                              const std::string& name = "mined");

struct QARanking {
  EntityId head = 0;
  RelationId relation = 0;
  std::unordered_map<EntityId, double> scores;  // max-pooled confidence per tail

  // 1 + number of tails scored strictly higher; nullopt when unreached.
  std::optional<std::size_t> rank_of(EntityId tail) const;
};

QARanking answer_query(EntityId head, RelationId r_q, const MinedPathSet& mined,
                       const InstanceGraph& g);

struct QAMetrics {
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  double mrr = 0.0;
  std::size_t n = 0;
};

QAMetrics qa_metrics_from_ranks(std::span<const std::optional<std::size_t>> ranks);

struct QAResult {
  QAMetrics metrics;
  std::vector<std::optional<std::size_t>> ranks;  // per test triple
};

// Raw protocol. Heads absent from g get an infinite rank.
QAResult evaluate_qa(std::span<const Triple> test, const std::map<RelationId, MinedPathSet>& mined,
                     const InstanceGraph& g, int threads = 1);

}  // namespace hinwalk
