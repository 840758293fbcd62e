#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "hinwalk/errors.hpp"
#include "hinwalk/linkpred.hpp"
#include "hinwalk/synthetic.hpp"
#include "lp_fixtures.hpp"

using namespace hinwalk;

TEST(Dataset, ToyCitizenPairsSurviveWithAlternatePaths) {
  InstanceGraph g = add_inverse_relations(make_toy_graph());
  const RelationId cit = g.relation_vocab().at("isCitizenOf");
  PreparedRelation prep = prepare_dataset(g, cit, 5, 0.0, 1);
  EXPECT_EQ(prep.dataset.train_pos.size(), 2u);
  EXPECT_TRUE(prep.dataset.test_pos.empty());
  EXPECT_THROW(prepare_dataset(g, cit, 2, 0.0, 1), DataError);
  EXPECT_THROW(prepare_dataset(g, cit, 1, 0.0, 1), ConfigError);
  EXPECT_THROW(prepare_dataset(g, cit, 5, 1.0, 1), ConfigError);
}

// The direct edge and its inverse do not count as an alternate path.
TEST(Dataset, DirectEdgeExcluded) {
  HinBuilder b;
  TypeId a = b.type("A");
  b.entity("x", {a});
  b.entity("y", {a});
  b.entity("z", {a});
  b.triple("x", "q", "y");
  InstanceGraph g = add_inverse_relations(b.build());
  const RelationId q = g.relation_vocab().at("q");
  EXPECT_FALSE(has_alternate_path(g, {0, 1}, q, 4));
  HinBuilder c;
  a = c.type("A");
  c.entity("x", {a});
  c.entity("y", {a});
  c.entity("z", {a});
  c.triple("x", "q", "y");
  c.triple("x", "r", "z");
  c.triple("z", "r", "y");
  InstanceGraph h = c.build();
  EXPECT_TRUE(has_alternate_path(h, {0, 1}, h.relation_vocab().at("q"), 2));
  EXPECT_FALSE(has_alternate_path(h, {0, 1}, h.relation_vocab().at("q"), 1));
}

TEST(Dataset, SplitSizesAndRemoval) {
  InstanceGraph g = add_inverse_relations(lpfix::perfect_separation(40));
  const RelationId q = g.relation_vocab().at("q");
  PreparedRelation prep = prepare_relation(g, q, 3, 0.3, 9);
  EXPECT_EQ(prep.dataset.test_pos.size(), 12u);
  EXPECT_EQ(prep.dataset.train_pos.size(), 28u);
  EXPECT_EQ(prep.dataset.train_neg.size(), 14u);
  EXPECT_EQ(prep.dataset.test_neg.size(), 6u);
  EXPECT_EQ(prep.graph.triples().size(), g.triples().size() - 2 * 12);
  for (const EntityPair& p : prep.dataset.test_pos) {
    EXPECT_FALSE(prep.graph.contains({p.head, q, p.tail}));
    EXPECT_TRUE(g.contains({p.head, q, p.tail}));
  }
  PreparedRelation again = prepare_relation(g, q, 3, 0.3, 9);
  EXPECT_EQ(again.dataset.test_pos, prep.dataset.test_pos);
  EXPECT_EQ(again.dataset.test_neg, prep.dataset.test_neg);
}

TEST(Negatives, AreTypedDistinctAndFalse) {
  InstanceGraph g = lpfix::perfect_separation(30);
  const RelationId q = g.relation_vocab().at("q");
  const PairSet& pos = g.relation_pairs(q);
  std::vector<EntityPair> positives(pos.begin(), pos.end());
  auto negs = generate_negatives(positives, g, q, 4);
  EXPECT_EQ(negs.size(), 15u);
  std::set<EntityPair> seen(negs.begin(), negs.end());
  EXPECT_EQ(seen.size(), negs.size());
  const TypeId T = g.type_vocab().at("T");
  for (const EntityPair& n : negs) {
    EXPECT_TRUE(g.has_type(n.tail, T));
    EXPECT_FALSE(std::binary_search(pos.begin(), pos.end(), n));
    EXPECT_NE(std::find_if(positives.begin(), positives.end(), [&](auto& p) { return p.head == n.head; }),
              positives.end());
  }
}

TEST(Negatives, ImpossibleCorruptionWarns) {
  HinBuilder b;
  TypeId a = b.type("A"), t = b.type("T");
  b.entity("x", {a});
  b.entity("y", {t});
  b.entity("z", {a});
  b.triple("x", "q", "y");
  b.triple("z", "q", "y");
  InstanceGraph g = b.build();
  const RelationId q = g.relation_vocab().at("q");
  std::vector<EntityPair> positives(g.relation_pairs(q).begin(), g.relation_pairs(q).end());
  std::vector<std::string> warnings;
  auto negs = generate_negatives(positives, g, q, 1, &warnings);
  EXPECT_TRUE(negs.empty());
  EXPECT_EQ(warnings.size(), 2u);  // both positives tried, neither corruptible
}

TEST(Features, ModesFromConnectivity) {
  InstanceGraph g = make_toy_graph();
  const RelationId cit = g.relation_vocab().at("isCitizenOf");
  std::vector<MetaPath> ms{parse_metapath("Person -GraduatedFrom-> University -LocatedIn-> Country", g),
                           parse_metapath("Person -BornIn-> City -LocatedIn-> Country", g)};
  MinedPathSet set = score_metapaths(g, cit, ms);  // BornIn path first (conf 1)
  auto e = [&](const char* n) { return g.entity_vocab().at(n); };
  std::vector<EntityPair> pairs{{e("MaxPlanck"), e("Germany")}, {e("JohnDoe"), e("Germany")},
                                {e("MarieCurie"), e("Germany")}};
  Eigen::MatrixXd bmat = connectivity_matrix(pairs, set, g);
  Eigen::MatrixXd expect(3, 2);
  expect << 1, 1, 0, 1, 0, 0;
  EXPECT_EQ(bmat, expect);
  Eigen::MatrixXd sum = pair_features(pairs, set, g, SimilarityMode::SumConf);
  EXPECT_DOUBLE_EQ(sum(0, 0), 1.0 + 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(sum(1, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(sum(2, 0), 0.0);
  EXPECT_EQ(pair_features(pairs, set, g, SimilarityMode::MetaCount)(0, 0), 2.0);
  Eigen::MatrixXd cf = pair_features(pairs, set, g, SimilarityMode::ConfFeat);
  EXPECT_DOUBLE_EQ(cf(1, 1), 2.0 / 3.0);
  EXPECT_EQ(pair_features(pairs[0], set, g, SimilarityMode::BinaryFeat), Eigen::VectorXd::Ones(2));
  EXPECT_TRUE(pair_features(pairs, set, g, SimilarityMode::BinaryFeat, 3).isApprox(bmat));
}

TEST(Features, ModeNames) {
  for (auto m : {SimilarityMode::SumConf, SimilarityMode::MetaCount, SimilarityMode::ConfFeat,
                 SimilarityMode::BinaryFeat})
    EXPECT_EQ(parse_similarity_mode(to_string(m)), m);
  EXPECT_THROW(parse_similarity_mode("cosine"), ConfigError);
  EXPECT_TRUE(is_scalar_mode(SimilarityMode::MetaCount));
  EXPECT_FALSE(is_scalar_mode(SimilarityMode::ConfFeat));
}

// Subgradient optimality of the lasso objective on centred data.
TEST(Lasso, SatisfiesOptimalityConditions) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const int n = 80, d = 6;
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = nd(rng);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = 2.0 * x(i, 0) - 1.0 * x(i, 3) + 0.5 + 0.1 * nd(rng);
  const double lam = 0.05;
  LassoModel m = fit_l1_regression(x, y, lam, 10000, 1e-12);
  ASSERT_TRUE(m.converged);
  Eigen::VectorXd r = y - m.predict(x);
  EXPECT_NEAR(r.mean(), 0.0, 1e-10);
  Eigen::VectorXd grad = x.transpose() * r / n;
  Eigen::VectorXd xr = (x.rowwise() - x.colwise().mean()).transpose() * r / n;
  for (int j = 0; j < d; ++j) {
    if (m.weights[j] != 0.0)
      EXPECT_NEAR(xr[j], lam * (m.weights[j] > 0 ? 1.0 : -1.0), 1e-8) << j;
    else
      EXPECT_LE(std::abs(xr[j]), lam + 1e-8) << j;
  }
  EXPECT_GT(m.weights[0], 1.5);
  EXPECT_LT(m.weights[3], -0.5);
  (void)grad;
}

TEST(Lasso, LargePenaltyZeroesWeightsAndConstantColumnsIgnored) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  LassoModel big = fit_l1_regression(x, y, 100.0);
  EXPECT_EQ(big.weights, Eigen::VectorXd::Zero(2));
  EXPECT_DOUBLE_EQ(big.intercept, 2.5);
  LassoModel none = fit_l1_regression(x, y, 0.0, 1000, 1e-14);
  EXPECT_NEAR(none.weights[0], 1.0, 1e-9);
  EXPECT_EQ(none.weights[1], 0.0);
  EXPECT_THROW(fit_l1_regression(x.topRows(1), y.head(1), 0.1), DataError);
}

TEST(Metrics, FourSampleFixture) {
  std::vector<double> s{0.9, 0.8, 0.7, 0.1};
  std::vector<int> l{1, 0, 1, 0};
  LPMetrics m = evaluate_lp(s, l);
  EXPECT_NEAR(m.roc_auc, 0.75, 1e-12);
  EXPECT_NEAR(m.ap, (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
}

TEST(Metrics, TiesAndInvariances) {
  std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  std::vector<int> l{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(evaluate_lp(flat, l).roc_auc, 0.5);
  EXPECT_DOUBLE_EQ(evaluate_lp(flat, l).ap, 0.5);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(50);
  std::vector<int> lab(50);
  for (int i = 0; i < 50; ++i) {
    s[static_cast<std::size_t>(i)] = std::round(u(rng) * 10.0) / 10.0;
    lab[static_cast<std::size_t>(i)] = i % 3 == 0;
  }
  LPMetrics base = evaluate_lp(s, lab);
  std::vector<double> mono(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) mono[i] = std::exp(3.0 * s[i]) - 7.0;
  LPMetrics m2 = evaluate_lp(mono, lab);
  EXPECT_NEAR(base.roc_auc, m2.roc_auc, 1e-12);
  EXPECT_NEAR(base.ap, m2.ap, 1e-12);
  std::vector<int> flipped(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i) flipped[i] = 1 - lab[i];
  std::vector<double> neg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  EXPECT_NEAR(evaluate_lp(s, flipped).roc_auc, 1.0 - base.roc_auc, 1e-12);
  EXPECT_NEAR(evaluate_lp(neg, lab).roc_auc, 1.0 - base.roc_auc, 1e-12);

  // Brute-force pair count.
  double wins = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (lab[i] == 1 && lab[j] == 0) {
        total += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  EXPECT_NEAR(base.roc_auc, wins / total, 1e-12);
  std::vector<int> one_class(4, 1);
  EXPECT_THROW(evaluate_lp(flat, one_class), DataError);
}

TEST(LinkPrediction, PerfectSeparationAllModes) {
  InstanceGraph g = add_inverse_relations(lpfix::perfect_separation(40));
  const RelationId q = g.relation_vocab().at("q");
  PreparedRelation prep = prepare_relation(g, q, 3, 0.3, 2);
  std::vector<MetaPath> ms{parse_metapath("S -a-> M -b-> T", prep.graph)};
  MinedPathSet set = score_metapaths(prep.graph, q, ms);
  for (auto mode : {SimilarityMode::SumConf, SimilarityMode::MetaCount, SimilarityMode::ConfFeat,
                    SimilarityMode::BinaryFeat}) {
    LPConfig cfg;
    cfg.mode = mode;
    LPRun run = run_link_prediction(prep.dataset, prep.graph, set, cfg);
    EXPECT_DOUBLE_EQ(run.metrics.roc_auc, 1.0) << to_string(mode);
    EXPECT_DOUBLE_EQ(run.metrics.ap, 1.0) << to_string(mode);
    EXPECT_EQ(run.labels.size(), run.pairs.size());
  }
}

TEST(LinkPrediction, SplitConfidenceSumVersusCount) {
  InstanceGraph g = lpfix::split_confidence();
  const RelationId q = g.relation_vocab().at("q");
  std::vector<MetaPath> ms{parse_metapath("S -a-> A -a2-> T", g), parse_metapath("S -b-> B -b2-> T", g)};
  MinedPathSet set = score_metapaths(g, q, ms);
  ASSERT_DOUBLE_EQ(set.entries[0].confidence, 0.9);
  ASSERT_DOUBLE_EQ(set.entries[1].confidence, 0.1);
  LPDataset data;
  data.relation = q;
  auto e = [&](const std::string& n) { return g.entity_vocab().at(n); };
  for (int k = 0; k < 100; ++k) data.test_pos.push_back({e("s" + std::to_string(k)), e("t" + std::to_string(k))});
  for (int k = 0; k < 50; ++k)
    data.test_neg.push_back({e("s" + std::to_string(k)), e("t" + std::to_string((k + 7) % 100))});
  LPConfig sum;
  EXPECT_NEAR(run_link_prediction(data, g, set, sum).metrics.roc_auc, 0.95, 1e-12);
  LPConfig count;
  count.mode = SimilarityMode::MetaCount;
  EXPECT_DOUBLE_EQ(run_link_prediction(data, g, set, count).metrics.roc_auc, 0.5);
}

TEST(NodeRemoval, ZeroRateMatchesBaselineAndFullRateRemovesSample) {
  InstanceGraph g = add_inverse_relations(lpfix::perfect_separation(40));
  const RelationId q = g.relation_vocab().at("q");
  PreparedRelation prep = prepare_relation(g, q, 3, 0.3, 2);
  std::vector<MetaPath> ms{parse_metapath("S -a-> M -b-> T", prep.graph)};
  LPConfig cfg;
  LPRun base = run_link_prediction(prep.dataset, prep.graph, score_metapaths(prep.graph, q, ms), cfg);
  std::vector<double> rates{0.0, 0.5, 1.0};
  auto rows = node_removal_study(prep, ms, rates, cfg, 0.4, 5);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].removed, 0u);
  EXPECT_EQ(rows[0].metrics.roc_auc, base.metrics.roc_auc);
  EXPECT_EQ(rows[0].metrics.ap, base.metrics.ap);
  // ceil(0.4 * 12) = 5 sampled positives, 10 distinct entities.
  EXPECT_EQ(rows[2].removed, 10u);
  EXPECT_EQ(rows[1].removed, 5u);
  EXPECT_TRUE(std::equal(rows[1].removed_entities.begin(), rows[1].removed_entities.end(),
                         rows[2].removed_entities.begin()));
  EXPECT_THROW(node_removal_study(prep, ms, rates, cfg, 0.0, 5), ConfigError);
}

TEST(PairsIO, RoundTrip) {
  InstanceGraph g = make_toy_graph();
  auto e = [&](const char* n) { return g.entity_vocab().at(n); };
  std::vector<EntityPair> pairs{{e("MaxPlanck"), e("Germany")}, {e("JohnDoe"), e("France")}};
  std::stringstream buf;
  write_pairs(buf, pairs, g);
  EXPECT_EQ(read_pairs(buf, g), pairs);
  std::istringstream bad("MaxPlanck\tAtlantis\n");
  EXPECT_THROW(read_pairs(bad, g), ParseError);
}
