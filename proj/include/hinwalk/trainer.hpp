#pragma once

// REINFORCE training: support-weighted query sampling, parallel rollouts,
// an exponential moving-average baseline and a round-robin relation schedule.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hinwalk/embedding.hpp"
#include "hinwalk/env.hpp"
#include "hinwalk/evaluate.hpp"
#include "hinwalk/graph.hpp"
#include "hinwalk/policy.hpp"

namespace hinwalk {

struct TrainConfig {
  int i_base = 500;  // iterations per relation block
  int i_r = 5;       // rounds over the relation list
  int k = 20;        // queries per iteration
  int n = 40;        // rollouts per query
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double alpha = 0.0005;
  double beta0 = 0.05;
  double beta_decay = 0.9;
  double baseline_rate = 0.9;
  int max_hops = 4;
  double narrow_threshold = 1.0;  // 1.0 keeps every supported type pair
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;  // throws ConfigError
};

struct IterationStats {
  std::int64_t iter = 0;
  RelationId relation = 0;
  double arrival = 0.0;
  double coverage = 0.0;
  double confidence = 0.0;
  double reward = 0.0;
  double baseline = 0.0;
  double entropy = 0.0;  // mean per-step policy entropy
};

// `iter,relation,arrival,coverage,confidence,reward,baseline,entropy`
void write_stats_header(std::ostream& out);
void write_stats_rows(std::ostream& out, std::span<const IterationStats> stats,
                      const InstanceGraph& g);

// K draws with replacement, weighted by support count.
std::vector<Query> sample_queries(std::span<const TypePairSupport> support, RelationId r_q, int k,
                                  std::mt19937_64& rng);
std::vector<Query> sample_queries(const InstanceGraph& g, const SchemaGraph& s, RelationId r_q,
                                  int k, std::mt19937_64& rng);

struct RewardContext {
  EvalCache* cache = nullptr;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

// N sampled episodes of exactly max_hops steps, scored by the cached
// evaluator and the arrival indicator.
RolloutBatch rollout(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                     const Query& q, int n, std::mt19937_64& rng, const RewardContext& ctx);

// Relation of every iteration in execution order.
std::vector<RelationId> relation_schedule(std::span<const RelationId> relations, int i_base,
                                          int i_r);

struct TrainProgress {
  std::int64_t blocks_done = 0;
  std::int64_t iterations_done = 0;
  std::int64_t rollouts = 0;  // sampled episodes so far (search budget)
};

class Trainer {
 public:
  Trainer(const InstanceGraph& g, const SchemaGraph& s, const EmbeddingTable& emb, TrainConfig cfg,
          PolicyParams init);

  const TrainConfig& config() const { return cfg_; }
  const PolicyParams& params() const { return params_; }
  const AdamState& adam() const { return adam_; }
  const TrainProgress& progress() const { return progress_; }
  const EmbeddingTable& embeddings() const { return *emb_; }
  const SchemaEnv& env() const { return env_; }
  EvalCache& cache() { return cache_; }

  std::string rng_state() const;
  void restore(PolicyParams params, AdamState adam, const std::string& rng_state,
               TrainProgress progress);

  // I_base iterations on r_q with entropy weight beta0 * decay^block_index.
  std::vector<IterationStats> train_relation_block(RelationId r_q, std::int64_t block_index);

  // Round-robin blocks; blocks already recorded in progress() are skipped so a
  // restored trainer resumes where it stopped. `on_block` runs after each block.
  std::vector<IterationStats> train_multi_relation(
      std::span<const RelationId> relations,
      const std::function<void(const Trainer&, std::span<const IterationStats>)>& on_block = {});

 private:
  const std::vector<TypePairSupport>& support(RelationId r_q);

  const InstanceGraph* g_;
  const SchemaGraph* s_;
  const EmbeddingTable* emb_;
  TrainConfig cfg_;
  SchemaEnv env_;
  EvalCache cache_;
  PolicyParams params_;
  AdamState adam_;
  std::mt19937_64 rng_;
  TrainProgress progress_;
  std::vector<std::vector<TypePairSupport>> support_;
  std::vector<char> support_ready_;
};

struct Checkpoint {
  PolicyParams params;
  AdamState adam;
  EmbeddingTable embeddings;
  std::string rng_state;
  TrainProgress progress;
  std::vector<RelationId> relations;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hinwalk
