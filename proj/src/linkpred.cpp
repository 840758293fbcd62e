#include "hinwalk/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "hinwalk/errors.hpp"
#include "hinwalk/parallel.hpp"

namespace hinwalk {

bool has_alternate_path(const InstanceGraph& g, EntityPair pair, RelationId r_q, int max_hops) {
  const RelationId inv_q = g.augmented() ? g.inverse(r_q) : r_q;
  auto is_direct = [&](EntityId u, const Triple& e) {
    if (e.relation != r_q && e.relation != inv_q) return false;
    return (u == pair.head && e.tail == pair.tail) || (u == pair.tail && e.tail == pair.head);
  };
  std::vector<int> depth(g.entity_id_count(), -1);
  std::deque<EntityId> frontier{pair.head};
  depth[static_cast<std::size_t>(pair.head)] = 0;
  while (!frontier.empty()) {
    EntityId u = frontier.front();
    frontier.pop_front();
    const int d = depth[static_cast<std::size_t>(u)];
    if (d >= max_hops) continue;
    for (const Triple& e : g.out_edges(u)) {
      if (is_direct(u, e)) continue;
      if (e.tail == pair.tail) return true;
      auto& dv = depth[static_cast<std::size_t>(e.tail)];
      if (dv < 0) {
        dv = d + 1;
        frontier.push_back(e.tail);
      }
    }
  }
  return false;
}

PreparedRelation prepare_dataset(const InstanceGraph& g, RelationId r_q, int l, double test_ratio,
                                 std::uint64_t seed) {
  if (l < 2) throw ConfigError("meta-path length l must be >= 2");
  if (!(test_ratio >= 0.0 && test_ratio < 1.0)) throw ConfigError("test ratio must lie in [0, 1)");
  std::vector<EntityPair> kept;
  for (const EntityPair& p : g.relation_pairs(r_q))
    if (has_alternate_path(g, p, r_q, l - 1)) kept.push_back(p);
  if (kept.empty())
    throw DataError("no '" + g.relation_vocab().name(r_q) +
                    "' pair has an alternate instance path within the hop limit");
  std::mt19937_64 rng(seed);
  std::shuffle(kept.begin(), kept.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(kept.size()) * test_ratio));
  PreparedRelation out;
  out.dataset.relation = r_q;
  out.dataset.test_pos.assign(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.dataset.train_pos.assign(kept.begin() + static_cast<std::ptrdiff_t>(n_test), kept.end());
  std::vector<Triple> facts;
  for (const EntityPair& p : out.dataset.test_pos) facts.push_back({p.head, r_q, p.tail});
  out.graph = remove_triples(g, facts);
  return out;
}

std::vector<EntityPair> generate_negatives(std::span<const EntityPair> positives,
                                           const InstanceGraph& g, RelationId r_q,
                                           std::uint64_t seed, std::vector<std::string>* warnings) {
  const std::size_t want = positives.size() / 2;
  const PairSet& truth = g.relation_pairs(r_q);
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::set<EntityPair> made;
  std::vector<EntityPair> out;
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  for (std::size_t idx : order) {
    if (out.size() >= want) break;
    const EntityPair& pos = positives[idx];
    std::vector<EntityId> pool;
    for (TypeId t : g.types_of(pos.tail))
      for (EntityId e : g.members(t)) pool.push_back(e);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    pool.erase(std::remove(pool.begin(), pool.end(), pos.tail), pool.end());
    if (pool.empty()) {
      warn("tail '" + g.entity_vocab().name(pos.tail) + "' has no same-type alternative; skipped");
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    bool done = false;
    for (int draw = 0; draw < 100 && !done; ++draw) {
      EntityPair neg{pos.head, pool[pick(rng)]};
      if (std::binary_search(truth.begin(), truth.end(), neg) || made.count(neg)) continue;
      made.insert(neg);
      out.push_back(neg);
      done = true;
    }
    if (!done)
      warn("no valid corruption for (" + g.entity_vocab().name(pos.head) + ", " +
           g.entity_vocab().name(pos.tail) + ") after 100 draws; skipped");
  }
  return out;
}

PreparedRelation prepare_relation(const InstanceGraph& g, RelationId r_q, int l, double test_ratio,
                                  std::uint64_t seed, std::vector<std::string>* warnings) {
  PreparedRelation prep = prepare_dataset(g, r_q, l, test_ratio, seed);
  prep.dataset.train_neg = generate_negatives(prep.dataset.train_pos, g, r_q, seed + 1, warnings);
  prep.dataset.test_neg = generate_negatives(prep.dataset.test_pos, g, r_q, seed + 2, warnings);
  return prep;
}

std::string_view to_string(SimilarityMode m) {
  switch (m) {
    case SimilarityMode::SumConf: return "sum_conf";
    case SimilarityMode::MetaCount: return "meta_count";
    case SimilarityMode::ConfFeat: return "conf_feat";
    case SimilarityMode::BinaryFeat: return "binary_feat";
  }
  return "?";
}

SimilarityMode parse_similarity_mode(std::string_view s) {
  for (auto m : {SimilarityMode::SumConf, SimilarityMode::MetaCount, SimilarityMode::ConfFeat,
                 SimilarityMode::BinaryFeat})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown similarity mode '" + std::string(s) +
                    "' (expected sum_conf, meta_count, conf_feat or binary_feat)");
}

Eigen::MatrixXd connectivity_matrix(std::span<const EntityPair> pairs, const MinedPathSet& mined,
                                    const InstanceGraph& g, int threads) {
  const auto n_paths = static_cast<Eigen::Index>(mined.entries.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairs.size()), n_paths);
  std::map<EntityId, std::vector<std::size_t>> by_head;
  for (std::size_t i = 0; i < pairs.size(); ++i) by_head[pairs[i].head].push_back(i);
  std::vector<std::pair<EntityId, std::vector<std::size_t>>> groups(by_head.begin(), by_head.end());
  parallel_for(groups.size(), threads, [&](std::size_t k) {
    const auto& [head, rows] = groups[k];
    if (!g.has_entity(head)) return;
    for (Eigen::Index j = 0; j < n_paths; ++j) {
      const MetaPath& m = mined.entries[static_cast<std::size_t>(j)].metapath;
      if (!g.has_type(head, m.head_type())) continue;
      const std::vector<EntityId> tails = reachable_tails(g, m, head);
      for (std::size_t row : rows)
        if (std::binary_search(tails.begin(), tails.end(), pairs[row].tail))
          b(static_cast<Eigen::Index>(row), j) = 1.0;
    }
  });
  return b;
}

Eigen::MatrixXd pair_features(std::span<const EntityPair> pairs, const MinedPathSet& mined,
                              const InstanceGraph& g, SimilarityMode mode, int threads) {
  Eigen::MatrixXd b = connectivity_matrix(pairs, mined, g, threads);
  Eigen::VectorXd conf(static_cast<Eigen::Index>(mined.entries.size()));
  for (std::size_t i = 0; i < mined.entries.size(); ++i)
    conf[static_cast<Eigen::Index>(i)] = mined.entries[i].confidence;
  switch (mode) {
    case SimilarityMode::SumConf: return b * conf;
    case SimilarityMode::MetaCount: return b.rowwise().sum();
    case SimilarityMode::ConfFeat: return b * conf.asDiagonal();
    case SimilarityMode::BinaryFeat: return b;
  }
  return b;
}

Eigen::VectorXd pair_features(EntityPair pair, const MinedPathSet& mined, const InstanceGraph& g,
                              SimilarityMode mode) {
  const EntityPair one[] = {pair};
  return pair_features(one, mined, g, mode).row(0).transpose();
}

Eigen::VectorXd LassoModel::predict(const Eigen::MatrixXd& x) const {
  return (x * weights).array() + intercept;
}

LassoModel fit_l1_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double reg_weight,
                             int max_sweeps, double tol) {
  const Eigen::Index n = x.rows();
  if (n < 2 || y.size() != n) throw DataError("lasso needs at least two labeled samples");
  if (!(reg_weight >= 0.0)) throw ConfigError("regularization weight must be >= 0");
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd col_sq = xc.colwise().squaredNorm().transpose() * inv_n;
  LassoModel model;
  model.weights = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd resid = y.array() - y_mean;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (col_sq[j] <= 1e-15) continue;
      const double w_old = model.weights[j];
      const double rho = xc.col(j).dot(resid) * inv_n + col_sq[j] * w_old;
      const double w_new = std::copysign(std::max(std::abs(rho) - reg_weight, 0.0), rho) / col_sq[j];
      const double delta = w_new - w_old;
      if (delta != 0.0) {
        resid -= delta * xc.col(j);
        model.weights[j] = w_new;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    model.sweeps = sweep + 1;
    if (max_change < tol) {
      model.converged = true;
      break;
    }
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  return model;
}

LPMetrics evaluate_lp(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ContractError("scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("ROC-AUC and AP need both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U from midranks.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  LPMetrics m;
  m.roc_auc = (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);

  // Step-interpolated precision over distinct thresholds, highest first.
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = order.size(); i > 0;) {
    std::size_t j = i;
    while (j > 0 && scores[order[j - 1]] == scores[order[i - 1]]) {
      --j;
      if (labels[order[j]] == 1)
        tp += 1.0;
      else
        fp += 1.0;
    }
    const double recall = tp / np;
    m.ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return m;
}

LPRun run_link_prediction(const LPDataset& data, const InstanceGraph& g, const MinedPathSet& mined,
                          const LPConfig& cfg) {
  LPRun run;
  run.pairs = data.test_pos;
  run.pairs.insert(run.pairs.end(), data.test_neg.begin(), data.test_neg.end());
  run.labels.assign(data.test_pos.size(), 1);
  run.labels.insert(run.labels.end(), data.test_neg.size(), 0);
  Eigen::MatrixXd test_x = pair_features(run.pairs, mined, g, cfg.mode, cfg.threads);
  Eigen::VectorXd scores;
  if (is_scalar_mode(cfg.mode)) {
    scores = test_x.col(0);
  } else {
    std::vector<EntityPair> train = data.train_pos;
    train.insert(train.end(), data.train_neg.begin(), data.train_neg.end());
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    y.head(static_cast<Eigen::Index>(data.train_pos.size())).setOnes();
    y.tail(static_cast<Eigen::Index>(data.train_neg.size())).setZero();
    if (data.train_pos.empty() || data.train_neg.empty())
      throw DataError("lasso training needs both positive and negative pairs");
    Eigen::MatrixXd train_x = pair_features(train, mined, g, cfg.mode, cfg.threads);
    LassoModel model = fit_l1_regression(train_x, y, cfg.reg_weight, cfg.max_sweeps, cfg.tol);
    scores = model.predict(test_x);
  }
  run.scores.assign(scores.data(), scores.data() + scores.size());
  run.metrics = evaluate_lp(run.scores, run.labels);
  return run;
}

std::vector<RemovalRow> node_removal_study(const PreparedRelation& prep,
                                           std::span<const MetaPath> paths,
                                           std::span<const double> rates, const LPConfig& cfg,
                                           double sample_fraction, std::uint64_t seed) {
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw ConfigError("sample fraction must lie in (0, 1]");
  std::vector<EntityPair> sampled = prep.dataset.test_pos;
  std::mt19937_64 rng(seed);
  std::shuffle(sampled.begin(), sampled.end(), rng);
  const auto n_sample = static_cast<std::size_t>(
      std::ceil(sample_fraction * static_cast<double>(sampled.size())));
  sampled.resize(std::min(n_sample, sampled.size()));
  std::vector<EntityId> nodes;
  for (const EntityPair& p : sampled) {
    for (EntityId e : {p.head, p.tail})
      if (std::find(nodes.begin(), nodes.end(), e) == nodes.end()) nodes.push_back(e);
  }
  std::shuffle(nodes.begin(), nodes.end(), rng);

  std::vector<RemovalRow> rows;
  for (double rate : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("removal rate must lie in [0, 1]");
    RemovalRow row;
    row.rate = rate;
    const auto k = std::min(nodes.size(), static_cast<std::size_t>(
                                              std::ceil(rate * static_cast<double>(nodes.size()))));
    row.removed_entities.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k));
    row.removed = k;
    InstanceGraph surgered = remove_entities(prep.graph, row.removed_entities);
    MinedPathSet mined = score_metapaths(surgered, prep.dataset.relation, paths);
    row.metrics = run_link_prediction(prep.dataset, surgered, mined, cfg).metrics;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_pairs(std::ostream& out, std::span<const EntityPair> pairs, const InstanceGraph& g) {
  for (const EntityPair& p : pairs)
    out << g.entity_vocab().name(p.head) << '\t' << g.entity_vocab().name(p.tail) << '\n';
}

std::vector<EntityPair> read_pairs(std::istream& in, const InstanceGraph& g, const std::string& name) {
  std::vector<EntityPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(name, lineno, "expected head<TAB>tail");
    auto h = g.entity_vocab().find(line.substr(0, tab));
    auto t = g.entity_vocab().find(line.substr(tab + 1));
    if (!h || !t) throw ParseError(name, lineno, "unknown entity");
    out.push_back({*h, *t});
  }
  return out;
}

}  // namespace hinwalk
