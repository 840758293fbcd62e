#include <gtest/gtest.h>

#include <random>

#include "hinwalk/errors.hpp"
#include "hinwalk/evaluate.hpp"
#include "hinwalk/synthetic.hpp"
#include "oracles.hpp"

using namespace hinwalk;

namespace {

std::set<std::pair<EntityId, EntityId>> as_set(const PairSet& p) {
  std::set<std::pair<EntityId, EntityId>> out;
  for (auto e : p) out.insert({e.head, e.tail});
  return out;
}

}  // namespace

TEST(Evaluate, ToyGraduatedLocatedPath) {
  InstanceGraph g = make_toy_graph();
  MetaPath m = parse_metapath("Person -GraduatedFrom-> University -LocatedIn-> Country", g);
  const RelationId cit = g.relation_vocab().at("isCitizenOf");
  auto e = [&](const char* n) { return g.entity_vocab().at(n); };
  std::set<std::pair<EntityId, EntityId>> expected{{e("MaxPlanck"), e("Germany")},
                                                   {e("MarieCurie"), e("France")},
                                                   {e("JohnDoe"), e("Germany")}};
  EXPECT_EQ(as_set(connected_pairs(g, m)), expected);
  EvalRecord rec = evaluate(g, m, cit);
  EXPECT_DOUBLE_EQ(rec.coverage, 1.0);
  EXPECT_DOUBLE_EQ(rec.confidence, 2.0 / 3.0);
  EXPECT_EQ(rec.n_connected, 3u);
  EXPECT_EQ(rec.n_both, 2u);
  EXPECT_EQ(rec.n_relation, 2u);
}

TEST(Evaluate, ScientistHeadTypeRestrictsPairs) {
  InstanceGraph g = make_toy_graph();
  MetaPath m = parse_metapath("Scientist -GraduatedFrom-> University -LocatedIn-> Country", g);
  EvalRecord rec = evaluate(g, m, g.relation_vocab().at("isCitizenOf"));
  EXPECT_EQ(rec.n_connected, 2u);
  EXPECT_DOUBLE_EQ(rec.confidence, 1.0);
}

TEST(Evaluate, CitizenshipExampleFractions) {
  InstanceGraph g = make_citizenship_graph(200, 150, 100);
  MetaPath m = parse_metapath("Person -GraduatedFrom-> University -LocatedIn-> Country", g);
  EvalRecord rec = evaluate(g, m, g.relation_vocab().at("isCitizenOf"));
  EXPECT_DOUBLE_EQ(rec.coverage, 150.0 / 200.0);
  EXPECT_DOUBLE_EQ(rec.confidence, 150.0 / 250.0);
}

TEST(Evaluate, MatchesDfsOracleOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RandomHinSpec spec;
    spec.max_entities = 60;
    spec.max_triples = 120;
    InstanceGraph g = make_random_hin(spec, seed);
    for (const MetaPath& m : oracle::all_schema_walks(g, 3)) {
      ASSERT_EQ(as_set(connected_pairs(g, m)), oracle::connected_pairs(g, m)) << "seed " << seed;
      const RelationId r = m.relations.front();
      EvalRecord rec = evaluate(g, m, r);
      auto o = oracle::score(g, m, r);
      EXPECT_DOUBLE_EQ(rec.coverage, o.coverage);
      EXPECT_DOUBLE_EQ(rec.confidence, o.confidence);
    }
  }
}

TEST(Evaluate, AllRelationsAgreeWithSingleCalls) {
  InstanceGraph g = make_random_hin({}, 77);
  for (const MetaPath& m : oracle::all_schema_walks(g, 2)) {
    auto all = evaluate_all(g, m);
    ASSERT_EQ(all.size(), g.num_relations());
    for (RelationId r = 0; r < static_cast<RelationId>(g.num_relations()); ++r)
      EXPECT_EQ(all[static_cast<std::size_t>(r)], evaluate(g, m, r));
  }
}

TEST(Evaluate, ReachableTailsAgreeWithPairs) {
  InstanceGraph g = make_random_hin({}, 3);
  for (const MetaPath& m : oracle::all_schema_walks(g, 2)) {
    auto pairs = as_set(connected_pairs(g, m));
    for (EntityId h : g.members(m.head_type()))
      for (EntityId t : reachable_tails(g, m, h)) EXPECT_TRUE(pairs.count({h, t}));
    std::size_t total = 0;
    for (EntityId h : g.members(m.head_type())) total += reachable_tails(g, m, h).size();
    EXPECT_EQ(total, pairs.size());
  }
}

TEST(Evaluate, ScoresStayInUnitInterval) {
  InstanceGraph g = make_random_hin({}, 9);
  for (const MetaPath& m : oracle::all_schema_walks(g, 3))
    for (RelationId r = 0; r < static_cast<RelationId>(g.num_relations()); ++r) {
      EvalRecord rec = evaluate(g, m, r);
      EXPECT_GE(rec.coverage, 0.0);
      EXPECT_LE(rec.coverage, 1.0);
      EXPECT_GE(rec.confidence, 0.0);
      EXPECT_LE(rec.confidence, 1.0);
      EXPECT_LE(rec.n_both, std::min(rec.n_connected, rec.n_relation));
    }
}

TEST(Evaluate, RewardIsNormalisedMean) {
  EXPECT_DOUBLE_EQ(reward(0.75, 0.6, 1, 1.0, 1.0), (0.75 + 0.6 + 1.0) / 3.0);
  EXPECT_DOUBLE_EQ(reward(1.0, 1.0, 1, 2.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(reward(0.0, 0.0, 0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(reward(0.5, 0.0, 0, 3.0, 1.0), 1.5 / 5.0);
}

TEST(Evaluate, ArrivalNeedsARealMove) {
  Query q{0, 0, 0};
  Trajectory stay_only{q, {{{}, {kStay, 0}, 0.0}}, 0};
  EXPECT_EQ(arrival_indicator(stay_only, q), 0);
  Trajectory loop{q, {{{}, {1, 2}, 0.0}, {{}, {3, 0}, 0.0}}, 0};
  EXPECT_EQ(arrival_indicator(loop, q), 1);
  Query q2{0, 0, 2};
  Trajectory stop{q2, {{{}, {1, 2}, 0.0}, {{}, {kStay, 2}, 0.0}}, 0};
  EXPECT_EQ(arrival_indicator(stop, q2), 1);
}

TEST(Evaluate, ValidRateCountsDistinctPaths) {
  InstanceGraph g = make_toy_graph();
  MetaPath good = parse_metapath("Person -BornIn-> City", g);
  MetaPath empty = parse_metapath("City -BornIn-> City", g);
  std::vector<MetaPath> ms{good, good, empty};
  EXPECT_DOUBLE_EQ(valid_rate(ms, g), 0.5);
  EXPECT_THROW(valid_rate(std::span<const MetaPath>{}, g), ContractError);
}

TEST(EvalCache, MemoisesAndMatchesDirect) {
  InstanceGraph g = make_toy_graph();
  EvalCache cache(g);
  MetaPath m = parse_metapath("Person -GraduatedFrom-> University -LocatedIn-> Country", g);
  const RelationId r = g.relation_vocab().at("isCitizenOf");
  EvalRecord a = cache.evaluate(m, r);
  EvalRecord b = cache.evaluate(m, r);
  EXPECT_EQ(a, evaluate(g, m, r));
  EXPECT_EQ(a, b);
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(cache.size(), 1u);
  cache.evaluate(m, g.relation_vocab().at("BornIn"));
  EXPECT_EQ(cache.size(), 2u);
}
