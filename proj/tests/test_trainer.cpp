#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "hinwalk/errors.hpp"
#include "hinwalk/synthetic.hpp"
#include "hinwalk/trainer.hpp"

using namespace hinwalk;

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.i_base = 4;
  cfg.i_r = 2;
  cfg.k = 3;
  cfg.n = 4;
  cfg.seed = 17;
  return cfg;
}

struct Planted {
  PlantedFixture fx = make_convergence_fixture(12, 4, 6, 7);
  EmbeddingTable emb = random_init(fx.schema.num_types(), fx.schema.num_relations(), 4, 2);
  PolicyParams init = PolicyParams::random({4, 8}, 3);
};

bool params_bit_equal(const PolicyParams& a, const PolicyParams& b) { return a == b; }

}  // namespace

TEST(Config, ValidationRejectsBadValues) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  for (auto mutate : std::vector<std::function<void(TrainConfig&)>>{
           [](TrainConfig& c) { c.k = 0; }, [](TrainConfig& c) { c.alpha = 0.0; },
           [](TrainConfig& c) { c.beta_decay = 1.5; }, [](TrainConfig& c) { c.baseline_rate = 1.0; },
           [](TrainConfig& c) { c.narrow_threshold = 0.0; }, [](TrainConfig& c) { c.threads = 0; },
           [](TrainConfig& c) { c.lambda1 = -1.0; }}) {
    TrainConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), ConfigError);
  }
}

TEST(QuerySampling, FollowsSupportWeights) {
  std::vector<TypePairSupport> support{{0, 1, 3}, {2, 1, 1}};
  std::mt19937_64 rng(123);
  auto qs = sample_queries(support, 5, 20000, rng);
  double first = 0.0;
  for (const Query& q : qs) {
    EXPECT_EQ(q.relation, 5);
    if (q.src_type == 0) first += 1.0;
  }
  EXPECT_NEAR(first / 20000.0, 0.75, 0.01);
  EXPECT_THROW(sample_queries(std::span<const TypePairSupport>{}, 0, 1, rng), DataError);
}

TEST(Schedule, RoundRobinBlocks) {
  std::vector<RelationId> rels{4, 9};
  auto s = relation_schedule(rels, 3, 2);
  EXPECT_EQ(s, (std::vector<RelationId>{4, 4, 4, 9, 9, 9, 4, 4, 4, 9, 9, 9}));
}

TEST(Rollout, RewardsMatchIndependentEvaluation) {
  Planted st;
  SchemaEnv env(st.fx.schema, 4);
  EvalCache cache(st.fx.graph);
  std::mt19937_64 rng(5);
  const Query q = st.fx.queries[0];
  RolloutBatch b = rollout(st.init, st.emb, env, q, 30, rng, {&cache, 1.0, 2.0});
  ASSERT_EQ(b.size(), 30u);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const Trajectory& tr = b.trajectories[j];
    EXPECT_EQ(tr.steps.size(), 4u);
    EXPECT_EQ(b.entropies[j].size(), 4u);
    double cov = 0.0, conf = 0.0;
    if (auto m = trajectory_to_metapath(tr)) {
      cov = coverage(st.fx.graph, *m, q.relation);
      conf = confidence(st.fx.graph, *m, q.relation);
    }
    EXPECT_DOUBLE_EQ(b.rewards[j], (cov + 2.0 * conf + arrival_indicator(tr, q)) / 4.0);
    EXPECT_GE(b.rewards[j], 0.0);
    EXPECT_LE(b.rewards[j], 1.0);
  }
  EXPECT_THROW(rollout(st.init, st.emb, env, q, 1, rng, {nullptr, 1, 1}), ContractError);
}

TEST(Trainer, BlockStatisticsAreBounded) {
  Planted st;
  TrainConfig cfg = tiny_config();
  Trainer tr(st.fx.graph, st.fx.schema, st.emb, cfg, st.init);
  auto stats = tr.train_relation_block(st.fx.targets[0], 0);
  ASSERT_EQ(stats.size(), 4u);
  EXPECT_DOUBLE_EQ(stats[0].baseline, stats[0].reward);
  for (std::size_t i = 1; i < stats.size(); ++i)
    EXPECT_NEAR(stats[i].baseline, 0.9 * stats[i - 1].baseline + 0.1 * stats[i].reward, 1e-15);
  for (const auto& s : stats) {
    for (double v : {s.arrival, s.coverage, s.confidence, s.reward, s.baseline}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GT(s.entropy, 0.0);
  }
  EXPECT_EQ(tr.progress().iterations_done, 4);
  EXPECT_EQ(tr.progress().rollouts, 4 * 3 * 4);
  EXPECT_EQ(tr.adam().t, 4);
  EXPECT_FALSE(params_bit_equal(tr.params(), st.init));
}

TEST(Trainer, SameSeedSameThreadsIsBitIdentical) {
  Planted st;
  TrainConfig cfg = tiny_config();
  cfg.threads = 2;
  std::vector<RelationId> rels{st.fx.targets[0]};
  Trainer a(st.fx.graph, st.fx.schema, st.emb, cfg, st.init);
  Trainer b(st.fx.graph, st.fx.schema, st.emb, cfg, st.init);
  a.train_multi_relation(rels);
  b.train_multi_relation(rels);
  EXPECT_TRUE(params_bit_equal(a.params(), b.params()));
}

// Rollouts use per-query seeds, so thread count only changes summation order.
TEST(Trainer, ThreadCountChangesOnlyRounding) {
  Planted st;
  TrainConfig c1 = tiny_config();
  TrainConfig c3 = tiny_config();
  c3.threads = 3;
  std::vector<RelationId> rels{st.fx.targets[0]};
  Trainer a(st.fx.graph, st.fx.schema, st.emb, c1, st.init);
  Trainer b(st.fx.graph, st.fx.schema, st.emb, c3, st.init);
  auto sa = a.train_multi_relation(rels);
  auto sb = b.train_multi_relation(rels);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i].reward, sb[i].reward, 1e-9);
  EXPECT_TRUE(a.params().w1.isApprox(b.params().w1, 1e-8));
}

TEST(Trainer, MismatchedEmbeddingsRejected) {
  Planted st;
  EmbeddingTable wrong = random_init(st.fx.schema.num_types(), st.fx.schema.num_relations(), 5, 1);
  EXPECT_THROW(Trainer(st.fx.graph, st.fx.schema, wrong, tiny_config(), st.init), ConfigError);
}

TEST(Trainer, UnsupportedRelationIsDataError) {
  HinBuilder b;
  TypeId a = b.type("A");
  b.entity("x", {a});
  b.entity("y", {a});
  b.triple("x", "r", "y");
  b.relation("unused");
  InstanceGraph g = b.build();
  SchemaGraph s = derive_schema_graph(g);
  EmbeddingTable emb = random_init(1, 2, 4, 1);
  Trainer tr(g, s, emb, tiny_config(), PolicyParams::random({4, 4}, 1));
  EXPECT_THROW(tr.train_relation_block(1, 0), DataError);
}

TEST(Checkpoint, ResumeMatchesUninterruptedRun) {
  Planted st;
  TrainConfig cfg = tiny_config();
  std::vector<RelationId> rels{st.fx.targets[0]};
  Trainer full(st.fx.graph, st.fx.schema, st.emb, cfg, st.init);
  auto all = full.train_multi_relation(rels);
  ASSERT_EQ(all.size(), 8u);

  auto path = (std::filesystem::temp_directory_path() / "hinwalk_test.ckpt").string();
  {
    Trainer first(st.fx.graph, st.fx.schema, st.emb, cfg, st.init);
    bool stop = false;
    try {
      first.train_multi_relation(rels, [&](const Trainer& t, std::span<const IterationStats>) {
        save_checkpoint(path, {t.params(), t.adam(), t.embeddings(), t.rng_state(), t.progress(), rels});
        stop = true;
        throw std::runtime_error("interrupt");
      });
    } catch (const std::runtime_error&) {
    }
    ASSERT_TRUE(stop);
  }
  Checkpoint ck = load_checkpoint(path);
  EXPECT_EQ(ck.progress.blocks_done, 1);
  EXPECT_EQ(ck.relations, rels);
  EXPECT_TRUE(ck.embeddings == st.emb);
  Trainer resumed(st.fx.graph, st.fx.schema, ck.embeddings, cfg, st.init);
  resumed.restore(ck.params, ck.adam, ck.rng_state, ck.progress);
  auto rest = resumed.train_multi_relation(rels);
  ASSERT_EQ(rest.size(), 4u);
  EXPECT_TRUE(params_bit_equal(resumed.params(), full.params()));
  EXPECT_EQ(rest.back().reward, all.back().reward);
  EXPECT_EQ(resumed.progress().rollouts, full.progress().rollouts);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsForeignFile) {
  auto path = (std::filesystem::temp_directory_path() / "hinwalk_not_a.ckpt").string();
  {
    std::ofstream out(path);
    out << "hello";
  }
  EXPECT_THROW(load_checkpoint(path), DataError);
  std::filesystem::remove(path);
}

TEST(Stats, CsvLayout) {
  InstanceGraph g = make_toy_graph();
  std::ostringstream out;
  write_stats_header(out);
  IterationStats s;
  s.iter = 3;
  s.relation = g.relation_vocab().at("BornIn");
  s.reward = 0.5;
  write_stats_rows(out, std::span(&s, 1), g);
  EXPECT_EQ(out.str(), "iter,relation,arrival,coverage,confidence,reward,baseline,entropy\n3,BornIn,0,0,0,0.5,0,0\n");
}
