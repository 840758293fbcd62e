#pragma once

// Instance-level scoring of meta-paths: connectivity, coverage, confidence,
// the arrival indicator and the normalized reward built from them.

#include <atomic>
#include <cstddef>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "hinwalk/env.hpp"
#include "hinwalk/graph.hpp"
#include "hinwalk/metapath.hpp"

namespace hinwalk {

// Pairs (v_1, v_l) joined by at least one path instance of m. Computed as a
// chain of type-projected boolean sparse products, binarized after each hop.
PairSet connected_pairs(const InstanceGraph& g, const MetaPath& m);

// Tails reachable from `head` along m (empty if head lacks m's head type).
std::vector<EntityId> reachable_tails(const InstanceGraph& g, const MetaPath& m, EntityId head);

struct EvalRecord {
  MetaPath metapath;
  RelationId relation = 0;
  double coverage = 0.0;
  double confidence = 0.0;
  std::size_t n_connected = 0;  // |pairs connected by m|
  std::size_t n_both = 0;       // |pairs connected by m and r_q|
  std::size_t n_relation = 0;   // |pairs connected by r_q|
  bool degenerate_coverage = false;  // r_q has no pairs; coverage forced to 0

  bool operator==(const EvalRecord&) const = default;
};

EvalRecord evaluate(const InstanceGraph& g, const MetaPath& m, RelationId r_q);
// Same, reusing pairs already computed by connected_pairs(g, m).
EvalRecord evaluate(const InstanceGraph& g, const MetaPath& m, const PairSet& pairs, RelationId r_q);
// One record per relation of g, propagating m once.
std::vector<EvalRecord> evaluate_all(const InstanceGraph& g, const MetaPath& m);
double coverage(const InstanceGraph& g, const MetaPath& m, RelationId r_q);
double confidence(const InstanceGraph& g, const MetaPath& m, RelationId r_q);

// 1 iff the trajectory ends on the query's target type after at least one
// real move.
int arrival_indicator(const Trajectory& tr, const Query& q);

double reward(double coverage, double confidence, int arrived, double lambda1, double lambda2);
inline double reward(const EvalRecord& rec, int arrived, double lambda1, double lambda2) {
  return reward(rec.coverage, rec.confidence, arrived, lambda1, lambda2);
}

// Fraction of distinct meta-paths with at least one instance in g.
double valid_rate(std::span<const MetaPath> ms, const InstanceGraph& g);
bool has_instance(const InstanceGraph& g, const MetaPath& m);

// Memo of (meta-path, relation) -> EvalRecord for a single graph. Lookups are
// shared, insertion exclusive; racing computations of one key are harmless
// because records are deterministic.
class EvalCache {
 public:
  explicit EvalCache(const InstanceGraph& g) : graph_(&g) {}
  EvalCache(const EvalCache&) = delete;
  EvalCache& operator=(const EvalCache&) = delete;

  const InstanceGraph& graph() const { return *graph_; }
  EvalRecord evaluate(const MetaPath& m, RelationId r_q);

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }
  std::size_t size() const;
  void reset_counters() {
    hits_ = 0;
    misses_ = 0;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int32_t>& k) const noexcept;
  };

  const InstanceGraph* graph_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::vector<std::int32_t>, EvalRecord, KeyHash> records_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

inline EvalRecord evaluate_cached(EvalCache& cache, const MetaPath& m, RelationId r_q) {
  return cache.evaluate(m, r_q);
}

}  // namespace hinwalk
