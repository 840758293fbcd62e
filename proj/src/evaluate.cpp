#include "hinwalk/evaluate.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <unordered_set>

#include "hinwalk/errors.hpp"

namespace hinwalk {

namespace {

// Dense bitset accumulator for one output row of a boolean product; only the
// touched words are cleared between rows.
class RowAccumulator {
 public:
  explicit RowAccumulator(std::size_t n) : words_((n + 63) / 64, 0) {}

  void set(EntityId e) {
    auto i = static_cast<std::size_t>(e);
    std::uint64_t bit = std::uint64_t{1} << (i & 63);
    std::uint64_t& w = words_[i >> 6];
    if (!(w & bit)) {
      w |= bit;
      touched_.push_back(e);
    }
  }

  // Sorted member list; resets the accumulator.
  void drain(std::vector<EntityId>& out) {
    std::sort(touched_.begin(), touched_.end());
    for (EntityId e : touched_) {
      out.push_back(e);
      words_[static_cast<std::size_t>(e) >> 6] = 0;
    }
    touched_.clear();
  }

  bool empty() const { return touched_.empty(); }

 private:
  std::vector<std::uint64_t> words_;
  std::vector<EntityId> touched_;
};

// Diagonal type selector over the entity id space.
std::vector<char> type_selector(const InstanceGraph& g, TypeId t) {
  std::vector<char> sel(g.entity_id_count(), 0);
  for (EntityId e : g.members(t)) sel[static_cast<std::size_t>(e)] = 1;
  return sel;
}

// Row-compressed boolean matrix restricted to non-empty rows.
struct BoolRows {
  std::vector<EntityId> heads;
  std::vector<std::size_t> offsets{0};
  std::vector<EntityId> cols;

  std::span<const EntityId> row(std::size_t i) const {
    return {cols.data() + offsets[i], cols.data() + offsets[i + 1]};
  }
};

// rows := binarize(rows * A(r)) * Sel(t)
BoolRows advance(const BoolRows& rows, const InstanceGraph& g, RelationId r,
                 const std::vector<char>& sel, RowAccumulator& acc) {
  BoolRows next;
  for (std::size_t i = 0; i < rows.heads.size(); ++i) {
    for (EntityId mid : rows.row(i))
      for (EntityId nb : g.successors(mid, r))
        if (sel[static_cast<std::size_t>(nb)]) acc.set(nb);
    if (acc.empty()) continue;
    next.heads.push_back(rows.heads[i]);
    acc.drain(next.cols);
    next.offsets.push_back(next.cols.size());
  }
  return next;
}

BoolRows propagate(const InstanceGraph& g, const MetaPath& m, std::span<const EntityId> heads) {
  if (m.types.size() < 2 || m.types.size() != m.relations.size() + 1)
    throw ContractError("malformed meta-path");
  BoolRows rows;
  for (EntityId h : heads) {
    rows.heads.push_back(h);
    rows.cols.push_back(h);
    rows.offsets.push_back(rows.cols.size());
  }
  RowAccumulator acc(g.entity_id_count());
  for (std::size_t k = 0; k < m.relations.size() && !rows.heads.empty(); ++k) {
    auto sel = type_selector(g, m.types[k + 1]);
    rows = advance(rows, g, m.relations[k], sel, acc);
  }
  return rows;
}

std::size_t intersection_size(const PairSet& a, const PairSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

PairSet connected_pairs(const InstanceGraph& g, const MetaPath& m) {
  BoolRows rows = propagate(g, m, g.members(m.types.front()));
  PairSet out;
  out.reserve(rows.cols.size());
  for (std::size_t i = 0; i < rows.heads.size(); ++i)
    for (EntityId t : rows.row(i)) out.push_back({rows.heads[i], t});
  return out;
}

std::vector<EntityId> reachable_tails(const InstanceGraph& g, const MetaPath& m, EntityId head) {
  if (!g.has_entity(head) || !g.has_type(head, m.types.front())) return {};
  const EntityId h[] = {head};
  BoolRows rows = propagate(g, m, h);
  return rows.cols;
}

bool has_instance(const InstanceGraph& g, const MetaPath& m) {
  for (EntityId h : g.members(m.types.front()))
    if (!reachable_tails(g, m, h).empty()) return true;
  return false;
}

EvalRecord evaluate(const InstanceGraph& g, const MetaPath& m, RelationId r_q) {
  return evaluate(g, m, connected_pairs(g, m), r_q);
}

EvalRecord evaluate(const InstanceGraph& g, const MetaPath& m, const PairSet& pairs, RelationId r_q) {
  if (r_q < 0 || static_cast<std::size_t>(r_q) >= g.num_relations())
    throw ContractError("relation id out of range");
  EvalRecord rec;
  rec.metapath = m;
  rec.relation = r_q;
  const PairSet& rel = g.relation_pairs(r_q);
  rec.n_connected = pairs.size();
  rec.n_relation = rel.size();
  rec.n_both = intersection_size(pairs, rel);
  if (rec.n_relation == 0) {
    rec.degenerate_coverage = true;
    rec.coverage = 0.0;
  } else {
    rec.coverage = static_cast<double>(rec.n_both) / static_cast<double>(rec.n_relation);
  }
  rec.confidence = rec.n_connected == 0
                       ? 0.0
                       : static_cast<double>(rec.n_both) / static_cast<double>(rec.n_connected);
  return rec;
}

std::vector<EvalRecord> evaluate_all(const InstanceGraph& g, const MetaPath& m) {
  const PairSet pairs = connected_pairs(g, m);
  std::vector<EvalRecord> out;
  out.reserve(g.num_relations());
  for (RelationId r = 0; r < static_cast<RelationId>(g.num_relations()); ++r) out.push_back(evaluate(g, m, pairs, r));
  return out;
}

double coverage(const InstanceGraph& g, const MetaPath& m, RelationId r_q) {
  return evaluate(g, m, r_q).coverage;
}

double confidence(const InstanceGraph& g, const MetaPath& m, RelationId r_q) {
  return evaluate(g, m, r_q).confidence;
}

int arrival_indicator(const Trajectory& tr, const Query& q) {
  bool moved = std::any_of(tr.steps.begin(), tr.steps.end(),
                           [](const TrajectoryStep& s) { return !s.action.is_stay(); });
  return (moved && tr.final_type() == q.tgt_type) ? 1 : 0;
}

double reward(double coverage, double confidence, int arrived, double lambda1, double lambda2) {
  return (lambda1 * coverage + lambda2 * confidence + static_cast<double>(arrived)) /
         (lambda1 + lambda2 + 1.0);
}

double valid_rate(std::span<const MetaPath> ms, const InstanceGraph& g) {
  if (ms.empty()) throw ContractError("valid_rate of an empty meta-path set");
  std::unordered_set<MetaPath, MetaPathHash> distinct(ms.begin(), ms.end());
  std::size_t valid = 0;
  for (const MetaPath& m : distinct)
    if (has_instance(g, m)) ++valid;
  return static_cast<double>(valid) / static_cast<double>(distinct.size());
}

// ------------------------------------------------------------------ EvalCache

std::size_t EvalCache::KeyHash::operator()(const std::vector<std::int32_t>& k) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int32_t v : k) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

EvalRecord EvalCache::evaluate(const MetaPath& m, RelationId r_q) {
  auto key = canonical_encoding(m);
  key.push_back(r_q);
  {
    std::shared_lock lock(mutex_);
    auto it = records_.find(key);
    if (it != records_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ++misses_;
  EvalRecord rec = hinwalk::evaluate(*graph_, m, r_q);
  std::unique_lock lock(mutex_);
  records_.insert_or_assign(std::move(key), rec);
  return rec;
}

std::size_t EvalCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace hinwalk
