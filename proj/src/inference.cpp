#include "hinwalk/inference.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include "hinwalk/errors.hpp"
#include "hinwalk/parallel.hpp"

namespace hinwalk {

namespace {

struct BeamNode {
  PolicyCursor cursor;
  Trajectory trajectory;
  double log_prob = 0.0;
};

struct Expansion {
  std::size_t parent = 0;
  std::size_t index = 0;
  double log_prob = 0.0;
};

// Lexicographic order on the action sequences parent + action.
bool sequence_less(const BeamNode& pa, const Action& a, const BeamNode& pb, const Action& b) {
  const auto& sa = pa.trajectory.steps;
  const auto& sb = pb.trajectory.steps;
  for (std::size_t i = 0; i < sa.size() && i < sb.size(); ++i) {
    if (sa[i].action < sb[i].action) return true;
    if (sb[i].action < sa[i].action) return false;
  }
  return a < b;
}

}  // namespace

std::vector<BeamEntry> beam_search(const PolicyParams& p, const EmbeddingTable& emb,
                                   const SchemaEnv& env, const Query& q, std::size_t width) {
  if (width < 1) throw ConfigError("beam width must be >= 1");
  std::vector<BeamNode> beam;
  beam.push_back({PolicyCursor(p, emb, env, q), Trajectory{q, {}, 0}, 0.0});
  while (!beam.front().cursor.done()) {
    std::vector<Expansion> ex;
    for (std::size_t b = 0; b < beam.size(); ++b) {
      const Eigen::VectorXd& lp = beam[b].cursor.log_probs();
      for (Eigen::Index a = 0; a < lp.size(); ++a)
        ex.push_back({b, static_cast<std::size_t>(a), beam[b].log_prob + lp[a]});
    }
    auto better = [&](const Expansion& x, const Expansion& y) {
      if (x.log_prob != y.log_prob) return x.log_prob > y.log_prob;
      return sequence_less(beam[x.parent], beam[x.parent].cursor.candidates()[x.index],
                           beam[y.parent], beam[y.parent].cursor.candidates()[y.index]);
    };
    const std::size_t keep = std::min(width, ex.size());
    std::partial_sort(ex.begin(), ex.begin() + static_cast<std::ptrdiff_t>(keep), ex.end(), better);
    std::vector<BeamNode> next;
    next.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      const BeamNode& parent = beam[ex[k].parent];
      BeamNode child = parent;
      const Action a = parent.cursor.candidates()[ex[k].index];
      const double step_lp = parent.cursor.log_probs()[static_cast<Eigen::Index>(ex[k].index)];
      child.trajectory.steps.push_back({parent.cursor.state(), a, step_lp});
      child.log_prob = ex[k].log_prob;
      child.cursor.advance(ex[k].index);
      next.push_back(std::move(child));
    }
    beam = std::move(next);
  }
  std::vector<BeamEntry> out;
  out.reserve(beam.size());
  for (BeamNode& n : beam) {
    n.trajectory.arrived = arrival_indicator(n.trajectory, q);
    out.push_back({std::move(n.trajectory), n.log_prob});
  }
  return out;
}

void sort_mined(MinedPathSet& set) {
  std::stable_sort(set.entries.begin(), set.entries.end(),
                   [](const ScoredMetaPath& a, const ScoredMetaPath& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     if (a.coverage != b.coverage) return a.coverage > b.coverage;
                     return canonical_encoding(a.metapath) < canonical_encoding(b.metapath);
                   });
}

MinedPathSet score_metapaths(const InstanceGraph& g, RelationId r_q, std::span<const MetaPath> paths,
                             EvalCache* cache) {
  MinedPathSet set;
  set.relation = r_q;
  std::unordered_set<MetaPath, MetaPathHash> seen;
  for (const MetaPath& m : paths) {
    if (!seen.insert(m).second) continue;
    EvalRecord rec = cache ? cache->evaluate(m, r_q) : evaluate(g, m, r_q);
    set.entries.push_back({m, rec.coverage, rec.confidence});
  }
  sort_mined(set);
  return set;
}

MinedPathSet mine_metapaths(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                            const InstanceGraph& g, RelationId r_q, std::span<const Query> queries,
                            std::size_t width, EvalCache* cache) {
  std::vector<MetaPath> paths;
  for (const Query& q : queries) {
    if (q.relation != r_q) throw ContractError("query relation differs from the mined relation");
    for (const BeamEntry& e : beam_search(p, emb, env, q, width)) {
      if (!e.trajectory.arrived) continue;
      auto m = trajectory_to_metapath(e.trajectory);
      if (!m || is_query_restatement(*m, q)) continue;
      paths.push_back(std::move(*m));
    }
  }
  return score_metapaths(g, r_q, paths, cache);
}

void write_mined(std::ostream& out, std::span<const MinedPathSet> sets, const InstanceGraph& g) {
  out.precision(17);
  for (const MinedPathSet& s : sets)
    for (const ScoredMetaPath& e : s.entries)
      out << g.relation_vocab().name(s.relation) << '\t' << format_metapath(e.metapath, g) << '\t'
          << e.coverage << '\t' << e.confidence << '\n';
}

std::map<RelationId, MinedPathSet> read_mined(std::istream& in, const InstanceGraph& g,
                                              const std::string& name) {
  std::map<RelationId, MinedPathSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 4) throw ParseError(name, lineno, "expected 4 tab-separated columns");
    auto r = g.relation_vocab().find(cols[0]);
    if (!r) throw ParseError(name, lineno, "unknown relation '" + cols[0] + "'");
    ScoredMetaPath e;
    try {
      e.metapath = parse_metapath(cols[1], g);
      e.coverage = std::stod(cols[2]);
      e.confidence = std::stod(cols[3]);
    } catch (const DataError& err) {
      throw ParseError(name, lineno, err.what());
    } catch (const std::exception&) {
      throw ParseError(name, lineno, "bad numeric column");
    }
    MinedPathSet& set = out[*r];
    set.relation = *r;
    set.entries.push_back(std::move(e));
  }
  for (auto& [r, set] : out) sort_mined(set);
  return out;
}

std::optional<std::size_t> QARanking::rank_of(EntityId tail) const {
  auto it = scores.find(tail);
  if (it == scores.end()) return std::nullopt;
  std::size_t greater = 0;
  for (const auto& [e, s] : scores)
    if (s > it->second) ++greater;
  return greater + 1;
}

QARanking answer_query(EntityId head, RelationId r_q, const MinedPathSet& mined,
                       const InstanceGraph& g) {
  if (!g.has_entity(head)) throw DataError("unknown head entity id " + std::to_string(head));
  QARanking out;
  out.head = head;
  out.relation = r_q;
  for (const ScoredMetaPath& e : mined.entries) {
    if (!g.has_type(head, e.metapath.head_type())) continue;
    for (EntityId t : reachable_tails(g, e.metapath, head)) {
      auto [it, inserted] = out.scores.try_emplace(t, e.confidence);
      if (!inserted) it->second = std::max(it->second, e.confidence);
    }
  }
  return out;
}

QAMetrics qa_metrics_from_ranks(std::span<const std::optional<std::size_t>> ranks) {
  QAMetrics m;
  m.n = ranks.size();
  if (ranks.empty()) return m;
  for (const auto& r : ranks) {
    if (!r) continue;
    if (*r <= 1) m.hits1 += 1.0;
    if (*r <= 3) m.hits3 += 1.0;
    if (*r <= 10) m.hits10 += 1.0;
    m.mrr += 1.0 / static_cast<double>(*r);
  }
  const double n = static_cast<double>(ranks.size());
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  m.mrr /= n;
  return m;
}

QAResult evaluate_qa(std::span<const Triple> test, const std::map<RelationId, MinedPathSet>& mined,
                     const InstanceGraph& g, int threads) {
  for (const Triple& t : test)
    if (!mined.count(t.relation))
      throw DataError("no mined meta-paths for test relation '" +
                      g.relation_vocab().name(t.relation) + "'");
  QAResult res;
  res.ranks.resize(test.size());
  parallel_for(test.size(), threads, [&](std::size_t i) {
    const Triple& t = test[i];
    if (!g.has_entity(t.head)) return;
    res.ranks[i] = answer_query(t.head, t.relation, mined.at(t.relation), g).rank_of(t.tail);
  });
  res.metrics = qa_metrics_from_ranks(res.ranks);
  return res;
}

}  // namespace hinwalk
