#include "hinwalk/env.hpp"

#include <algorithm>

#include "hinwalk/errors.hpp"

namespace hinwalk {

SchemaEnv::SchemaEnv(const SchemaGraph& schema, int max_hops) : schema_(&schema), max_hops_(max_hops) {
  if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
}

State SchemaEnv::reset(const Query& q) const {
  if (q.src_type < 0 || static_cast<std::size_t>(q.src_type) >= schema_->num_types())
    throw ContractError("query source type out of range");
  return State{q.src_type, q, 0, false};
}

std::vector<Action> SchemaEnv::candidate_actions(const State& s) const {
  std::vector<Action> out;
  auto edges = schema_->outgoing(s.current_type);
  out.reserve(edges.size() + 1);
  const bool mask_direct = !s.moved && s.current_type == s.query.src_type;
  for (const SchemaEdge& e : edges) {
    if (mask_direct && e.relation == s.query.relation && e.dst == s.query.tgt_type) continue;
    out.push_back({e.relation, e.dst});
  }
  out.push_back({kStay, s.current_type});
  return out;
}

State SchemaEnv::step(const State& s, const Action& a) const {
  if (is_terminal(s)) throw ContractError("step() on a terminal state");
  if (a.is_stay()) {
    if (a.dst_type != s.current_type) throw ContractError("STAY must keep the current type");
  } else {
    auto cands = candidate_actions(s);
    if (std::find(cands.begin(), cands.end(), a) == cands.end())
      throw ContractError("illegal action for the current state");
  }
  State next = s;
  next.current_type = a.dst_type;
  next.step += 1;
  next.moved = s.moved || !a.is_stay();
  return next;
}

std::optional<MetaPath> trajectory_to_metapath(const Trajectory& tr) {
  MetaPath m;
  m.types.push_back(tr.query.src_type);
  for (const TrajectoryStep& st : tr.steps) {
    if (st.action.is_stay()) continue;
    m.relations.push_back(st.action.relation);
    m.types.push_back(st.action.dst_type);
  }
  if (m.relations.empty()) return std::nullopt;
  return m;
}

bool is_query_restatement(const MetaPath& m, const Query& q) {
  return m.relations.size() == 1 && m.relations[0] == q.relation && m.types[0] == q.src_type &&
         m.types[1] == q.tgt_type;
}

}  // namespace hinwalk
