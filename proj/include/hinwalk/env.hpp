#pragma once

// Meta-path search as an MDP on the schema graph. States carry the current
// type and the query; actions follow outgoing schema edges or stay put.

#include <optional>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/metapath.hpp"

namespace hinwalk {

inline constexpr RelationId kStay = -1;

struct Action {
  RelationId relation = kStay;
  TypeId dst_type = 0;

  bool is_stay() const { return relation == kStay; }

  // Real edges in (relation, dst) order, STAY after all of them.
  std::strong_ordering operator<=>(const Action& o) const {
    if (is_stay() != o.is_stay()) return is_stay() ? std::strong_ordering::greater : std::strong_ordering::less;
    if (auto c = relation <=> o.relation; c != 0) return c;
    return dst_type <=> o.dst_type;
  }
  bool operator==(const Action&) const = default;
};

struct State {
  TypeId current_type = 0;
  Query query;
  int step = 0;
  bool moved = false;  // a real edge has been taken

  bool operator==(const State&) const = default;
};

struct TrajectoryStep {
  State state;
  Action action;
  double log_prob = 0.0;
};

struct Trajectory {
  Query query;
  std::vector<TrajectoryStep> steps;
  int arrived = 0;

  TypeId final_type() const {
    return steps.empty() ? query.src_type : steps.back().action.dst_type;
  }
};

class SchemaEnv {
 public:
  // max_hops real decision steps per episode (4 for five-node meta-paths).
  explicit SchemaEnv(const SchemaGraph& schema, int max_hops = 4);

  const SchemaGraph& schema() const { return *schema_; }
  int max_hops() const { return max_hops_; }

  State reset(const Query& q) const;

  // Outgoing edges of the current type plus STAY. Until the first real move the
  // direct edge (q.relation, q.tgt_type) out of q.src_type is masked so the
  // one-hop meta-path that restates the query is never produced.
  std::vector<Action> candidate_actions(const State& s) const;

  State step(const State& s, const Action& a) const;
  bool is_terminal(const State& s) const { return s.step >= max_hops_; }

 private:
  const SchemaGraph* schema_;
  int max_hops_;
};

// The meta-path of visited types and taken relations, STAYs removed.
std::optional<MetaPath> trajectory_to_metapath(const Trajectory& tr);

// True for the one-hop meta-path (src, r_q, tgt) that restates the query.
bool is_query_restatement(const MetaPath& m, const Query& q);

}  // namespace hinwalk
