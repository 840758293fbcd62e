#include "hinwalk/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hinwalk/binary_io.hpp"
#include "hinwalk/errors.hpp"
#include "hinwalk/parallel.hpp"

namespace hinwalk {

void TrainConfig::validate() const {
  if (i_base <= 0 || i_r <= 0 || k <= 0 || n <= 0)
    throw ConfigError("i_base, i_r, k and n must be positive");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ConfigError("lambda1 and lambda2 must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(beta0 >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(beta_decay > 0.0 && beta_decay <= 1.0)) throw ConfigError("beta decay must lie in (0, 1]");
  if (!(baseline_rate >= 0.0 && baseline_rate < 1.0))
    throw ConfigError("baseline rate must lie in [0, 1)");
  if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
  if (!(narrow_threshold > 0.0 && narrow_threshold <= 1.0))
    throw ConfigError("narrow threshold must lie in (0, 1]");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

void write_stats_header(std::ostream& out) {
  out << "iter,relation,arrival,coverage,confidence,reward,baseline,entropy\n";
}

void write_stats_rows(std::ostream& out, std::span<const IterationStats> stats,
                      const InstanceGraph& g) {
  for (const IterationStats& s : stats)
    out << s.iter << ',' << g.relation_vocab().name(s.relation) << ',' << s.arrival << ','
        << s.coverage << ',' << s.confidence << ',' << s.reward << ',' << s.baseline << ','
        << s.entropy << '\n';
}

std::vector<Query> sample_queries(std::span<const TypePairSupport> support, RelationId r_q, int k,
                                  std::mt19937_64& rng) {
  if (support.empty()) throw DataError("relation has no supported type pair to sample");
  std::vector<double> weights;
  weights.reserve(support.size());
  for (const TypePairSupport& s : support) weights.push_back(static_cast<double>(s.count));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<Query> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) {
    const TypePairSupport& s = support[pick(rng)];
    out.push_back({s.src_type, r_q, s.tgt_type});
  }
  return out;
}

std::vector<Query> sample_queries(const InstanceGraph& g, const SchemaGraph& s, RelationId r_q,
                                  int k, std::mt19937_64& rng) {
  return sample_queries(type_pairs_for_relation(g, s, r_q), r_q, k, rng);
}

RolloutBatch rollout(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                     const Query& q, int n, std::mt19937_64& rng, const RewardContext& ctx) {
  if (!ctx.cache) throw ContractError("rollout needs an evaluation cache");
  RolloutBatch batch;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    PolicyCursor cur(p, emb, env, q);
    Trajectory tr{q, {}, 0};
    std::vector<double> ents;
    while (!cur.done()) {
      const Eigen::VectorXd& lp = cur.log_probs();
      Eigen::VectorXd probs = lp.array().exp().matrix();
      ents.push_back(-(probs.array() * lp.array()).sum());
      const double u = unit(rng);
      Eigen::Index idx = probs.size() - 1;
      double acc = 0.0;
      for (Eigen::Index a = 0; a < probs.size(); ++a) {
        acc += probs[a];
        if (u < acc) {
          idx = a;
          break;
        }
      }
      tr.steps.push_back({cur.state(), cur.candidates()[static_cast<std::size_t>(idx)], lp[idx]});
      cur.advance(static_cast<std::size_t>(idx));
    }
    tr.arrived = arrival_indicator(tr, q);
    double cov = 0.0;
    double conf = 0.0;
    if (auto m = trajectory_to_metapath(tr)) {
      EvalRecord rec = ctx.cache->evaluate(*m, q.relation);
      cov = rec.coverage;
      conf = rec.confidence;
    }
    batch.rewards.push_back(reward(cov, conf, tr.arrived, ctx.lambda1, ctx.lambda2));
    batch.coverage.push_back(cov);
    batch.confidence.push_back(conf);
    batch.entropies.push_back(std::move(ents));
    batch.trajectories.push_back(std::move(tr));
  }
  return batch;
}

std::vector<RelationId> relation_schedule(std::span<const RelationId> relations, int i_base,
                                          int i_r) {
  std::vector<RelationId> out;
  for (int round = 0; round < i_r; ++round)
    for (RelationId r : relations) out.insert(out.end(), static_cast<std::size_t>(i_base), r);
  return out;
}

// --------------------------------------------------------------------- Trainer

Trainer::Trainer(const InstanceGraph& g, const SchemaGraph& s, const EmbeddingTable& emb,
                 TrainConfig cfg, PolicyParams init)
    : g_(&g),
      s_(&s),
      emb_(&emb),
      cfg_(cfg),
      env_(s, cfg.max_hops),
      cache_(g),
      params_(std::move(init)),
      adam_(AdamState::zeros(params_.dims)),
      rng_(cfg.seed),
      support_(s.num_relations()),
      support_ready_(s.num_relations(), 0) {
  cfg_.validate();
  if (emb.dim() != params_.dims.embed_dim)
    throw ConfigError("embedding dimension does not match the policy's d_e");
  if (static_cast<std::size_t>(emb.type.cols()) != s.num_types() ||
      static_cast<std::size_t>(emb.relation.cols()) < s.num_relations())
    throw DataError("embedding table does not cover the schema's types and relations");
}

std::string Trainer::rng_state() const {
  std::ostringstream os;
  os << rng_;
  return os.str();
}

void Trainer::restore(PolicyParams params, AdamState adam, const std::string& rng_state,
                      TrainProgress progress) {
  if (!(params.dims == params_.dims)) throw DataError("checkpoint policy dimensions differ");
  params_ = std::move(params);
  adam_ = std::move(adam);
  std::istringstream is(rng_state);
  is >> rng_;
  if (!is) throw DataError("checkpoint RNG state is unreadable");
  progress_ = progress;
}

const std::vector<TypePairSupport>& Trainer::support(RelationId r_q) {
  if (r_q < 0 || static_cast<std::size_t>(r_q) >= support_.size())
    throw ContractError("relation id out of range");
  auto i = static_cast<std::size_t>(r_q);
  if (!support_ready_[i]) {
    auto pairs = type_pairs_for_relation(*g_, *s_, r_q);
    if (pairs.empty())
      throw DataError("relation '" + g_->relation_vocab().name(r_q) +
                      "' has no supported type pair in the training graph");
    support_[i] = narrow_query_set(pairs, cfg_.narrow_threshold);
    support_ready_[i] = 1;
  }
  return support_[i];
}

std::vector<IterationStats> Trainer::train_relation_block(RelationId r_q, std::int64_t block_index) {
  const double beta = cfg_.beta0 * std::pow(cfg_.beta_decay, static_cast<double>(block_index));
  const RewardContext ctx{&cache_, cfg_.lambda1, cfg_.lambda2};
  const AdamConfig adam_cfg{cfg_.alpha};
  const auto k = static_cast<std::size_t>(cfg_.k);
  std::vector<IterationStats> stats;
  stats.reserve(static_cast<std::size_t>(cfg_.i_base));
  double baseline = 0.0;
  for (int it = 0; it < cfg_.i_base; ++it) {
    const std::vector<Query> queries = sample_queries(support(r_q), r_q, cfg_.k, rng_);
    std::vector<std::uint64_t> seeds(k);
    for (auto& sd : seeds) sd = rng_();
    std::vector<RolloutBatch> parts(k);
    parallel_for(k, cfg_.threads, [&](std::size_t i) {
      std::mt19937_64 local(seeds[i]);
      parts[i] = rollout(params_, *emb_, env_, queries[i], cfg_.n, local, ctx);
    });
    RolloutBatch batch;
    for (auto& part : parts) batch.append(std::move(part));

    IterationStats st;
    st.iter = progress_.iterations_done;
    st.relation = r_q;
    double ent_sum = 0.0;
    std::size_t ent_n = 0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      st.arrival += batch.trajectories[j].arrived;
      st.coverage += batch.coverage[j];
      st.confidence += batch.confidence[j];
      st.reward += batch.rewards[j];
      for (double e : batch.entropies[j]) ent_sum += e;
      ent_n += batch.entropies[j].size();
    }
    const double B = static_cast<double>(batch.size());
    st.arrival /= B;
    st.coverage /= B;
    st.confidence /= B;
    st.reward /= B;
    st.entropy = ent_n ? ent_sum / static_cast<double>(ent_n) : 0.0;

    baseline = it == 0 ? st.reward
                       : cfg_.baseline_rate * baseline + (1.0 - cfg_.baseline_rate) * st.reward;
    st.baseline = baseline;

    PolicyParams grads = policy_gradients(params_, *emb_, env_, batch, baseline, beta, cfg_.threads);
    adam_update(params_, grads, adam_, adam_cfg);
    if (!params_.all_finite())
      throw NumericError("policy parameters became non-finite at iteration " +
                         std::to_string(progress_.iterations_done));
    stats.push_back(st);
    progress_.iterations_done += 1;
    progress_.rollouts += static_cast<std::int64_t>(batch.size());
  }
  return stats;
}

std::vector<IterationStats> Trainer::train_multi_relation(
    std::span<const RelationId> relations,
    const std::function<void(const Trainer&, std::span<const IterationStats>)>& on_block) {
  if (relations.empty()) throw ConfigError("no training relations");
  std::vector<IterationStats> all;
  std::int64_t block = 0;
  for (int round = 0; round < cfg_.i_r; ++round) {
    for (RelationId r : relations) {
      if (block < progress_.blocks_done) {
        ++block;
        continue;
      }
      auto stats = train_relation_block(r, block);
      progress_.blocks_done = ++block;
      if (on_block) on_block(*this, stats);
      all.insert(all.end(), stats.begin(), stats.end());
    }
  }
  return all;
}

// ------------------------------------------------------------------ checkpoint

namespace {

constexpr char kCheckpointMagic[8] = {'H', 'W', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint '" + path + "'");
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    bin::put_u32(out, kCheckpointVersion);
    write_params(out, ck.params);
    write_params(out, ck.adam.m);
    write_params(out, ck.adam.v);
    bin::put_u64(out, static_cast<std::uint64_t>(ck.adam.t));
    bin::put_matrix(out, ck.embeddings.entity);
    bin::put_matrix(out, ck.embeddings.relation);
    bin::put_matrix(out, ck.embeddings.type);
    bin::put_matrix(out, ck.embeddings.start);
    bin::put_matrix(out, ck.embeddings.stay);
    bin::put_string(out, ck.rng_state);
    bin::put_u64(out, static_cast<std::uint64_t>(ck.progress.blocks_done));
    bin::put_u64(out, static_cast<std::uint64_t>(ck.progress.iterations_done));
    bin::put_u64(out, static_cast<std::uint64_t>(ck.progress.rollouts));
    bin::put_u64(out, ck.relations.size());
    for (RelationId r : ck.relations) bin::put_u32(out, static_cast<std::uint32_t>(r));
    if (!out) throw DataError("failed writing checkpoint '" + path + "'");
  }
  std::rename(tmp.c_str(), path.c_str());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw DataError("'" + path + "' is not a checkpoint");
  if (bin::get_u32(in) != kCheckpointVersion)
    throw DataError("unsupported checkpoint version in '" + path + "'");
  Checkpoint ck;
  ck.params = read_params(in);
  ck.adam.m = read_params(in);
  ck.adam.v = read_params(in);
  ck.adam.t = static_cast<std::int64_t>(bin::get_u64(in));
  bin::get_matrix(in, ck.embeddings.entity);
  bin::get_matrix(in, ck.embeddings.relation);
  bin::get_matrix(in, ck.embeddings.type);
  bin::get_matrix(in, ck.embeddings.start);
  bin::get_matrix(in, ck.embeddings.stay);
  ck.rng_state = bin::get_string(in);
  ck.progress.blocks_done = static_cast<std::int64_t>(bin::get_u64(in));
  ck.progress.iterations_done = static_cast<std::int64_t>(bin::get_u64(in));
  ck.progress.rollouts = static_cast<std::int64_t>(bin::get_u64(in));
  auto n = bin::get_u64(in);
  if (n > 1'000'000) throw DataError("implausible relation count in checkpoint");
  for (std::uint64_t i = 0; i < n; ++i) ck.relations.push_back(static_cast<RelationId>(bin::get_u32(in)));
  return ck;
}

}  // namespace hinwalk
