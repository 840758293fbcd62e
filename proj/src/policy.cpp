#include "hinwalk/policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hinwalk/binary_io.hpp"
#include "hinwalk/errors.hpp"
#include "hinwalk/nn_kernels.hpp"
#include "hinwalk/parallel.hpp"

namespace hinwalk {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Flat views of every tensor, in for_each_tensor order.
std::vector<Eigen::Map<VectorXd>> flat_views(PolicyParams& p) {
  std::vector<Eigen::Map<VectorXd>> out;
  p.for_each_tensor([&](std::string_view, auto& t) { out.emplace_back(t.data(), t.size()); });
  return out;
}

void check_dims(PolicyDims d) {
  if (d.embed_dim <= 0 || d.hidden_dim <= 0) throw ConfigError("policy dimensions must be positive");
}

}  // namespace

PolicyParams PolicyParams::zeros(PolicyDims d) {
  check_dims(d);
  const int H = d.hidden_dim;
  PolicyParams p;
  p.dims = d;
  p.lstm[0].weight = MatrixXd::Zero(4 * H, d.input_width() + H);
  p.lstm[0].bias = VectorXd::Zero(4 * H);
  p.lstm[1].weight = MatrixXd::Zero(4 * H, 2 * H);
  p.lstm[1].bias = VectorXd::Zero(4 * H);
  p.w1 = MatrixXd::Zero(H, d.encoding_width());
  p.b1 = VectorXd::Zero(H);
  p.w2 = MatrixXd::Zero(2 * d.embed_dim, H);
  p.b2 = VectorXd::Zero(2 * d.embed_dim);
  return p;
}

PolicyParams PolicyParams::random(PolicyDims d, std::uint64_t seed) {
  PolicyParams p = zeros(d);
  std::mt19937_64 rng(seed);
  auto fill = [&](MatrixXd& w, VectorXd& b) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = u(rng);
    for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = u(rng);
  };
  fill(p.lstm[0].weight, p.lstm[0].bias);
  fill(p.lstm[1].weight, p.lstm[1].bias);
  fill(p.w1, p.b1);
  fill(p.w2, p.b2);
  return p;
}

std::size_t PolicyParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](std::string_view, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

bool PolicyParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::string_view, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

bool PolicyParams::operator==(const PolicyParams& o) const {
  if (!(dims == o.dims)) return false;
  auto a = flat_views(const_cast<PolicyParams&>(*this));
  auto b = flat_views(const_cast<PolicyParams&>(o));
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].size() != b[k].size() || a[k] != b[k]) return false;
  return true;
}

RecurrentState RecurrentState::zeros(int hidden_dim) {
  RecurrentState s;
  for (int l = 0; l < 2; ++l) {
    s.h[l] = VectorXd::Zero(hidden_dim);
    s.c[l] = VectorXd::Zero(hidden_dim);
  }
  return s;
}

std::pair<RecurrentState, VectorXd> encode_step(const PolicyParams& p, const RecurrentState& prev,
                                                const VectorXd& prev_rel, const VectorXd& cur_type) {
  if (prev_rel.size() != p.dims.embed_dim || cur_type.size() != p.dims.embed_dim)
    throw ContractError("encoder input width does not match the embedding dimension");
  RecurrentState next = prev;
  VectorXd x(p.dims.input_width());
  x << prev_rel, cur_type;
  nn::lstm_forward<double>(p.lstm[0].weight, p.lstm[0].bias, x, next.h[0], next.c[0]);
  nn::lstm_forward<double>(p.lstm[1].weight, p.lstm[1].bias, next.h[0], next.h[1], next.c[1]);
  VectorXd s = next.h[1];
  return {std::move(next), std::move(s)};
}

VectorXd build_encoding(const VectorXd& s, const VectorXd& t_i, const VectorXd& r_q,
                        const VectorXd& t_tgt) {
  VectorXd enc(s.size() + 3 * t_i.size());
  enc << s, t_i, r_q, t_tgt - r_q;
  return enc;
}

VectorXd action_relation_vector(const EmbeddingTable& emb, const Action& a) {
  return a.is_stay() ? emb.stay : VectorXd(emb.relation.col(a.relation));
}

MatrixXd decision_matrix(const EmbeddingTable& emb, const std::vector<Action>& candidates,
                         TypeId current_type) {
  const int d = emb.dim();
  MatrixXd D(static_cast<Eigen::Index>(candidates.size()), 2 * d);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Action& a = candidates[k];
    const auto row = static_cast<Eigen::Index>(k);
    D.row(row).head(d) = action_relation_vector(emb, a).transpose();
    D.row(row).tail(d) = emb.type.col(a.is_stay() ? current_type : a.dst_type).transpose();
  }
  return D;
}

VectorXd action_scores(const PolicyParams& p, const VectorXd& enc, const MatrixXd& decision) {
  VectorXd u = nn::relu(p.w1 * enc + p.b1);
  VectorXd out = p.w2 * u + p.b2;
  return decision * out;
}

VectorXd action_distribution(const PolicyParams& p, const VectorXd& enc, const MatrixXd& decision) {
  if (decision.rows() == 0) throw ContractError("action distribution over no candidates");
  return nn::softmax<double>(action_scores(p, enc, decision));
}

// ---------------------------------------------------------------- PolicyCursor

PolicyCursor::PolicyCursor(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                           const Query& q)
    : p_(&p),
      emb_(&emb),
      env_(&env),
      state_(env.reset(q)),
      rec_(RecurrentState::zeros(p.dims.hidden_dim)),
      prev_rel_(emb.start) {
  refresh();
}

void PolicyCursor::refresh() {
  if (done()) {
    candidates_.clear();
    log_probs_.resize(0);
    return;
  }
  const VectorXd t_cur = emb_->type.col(state_.current_type);
  auto [rec, s] = encode_step(*p_, rec_, prev_rel_, t_cur);
  rec_ = std::move(rec);
  VectorXd enc = build_encoding(s, t_cur, emb_->relation.col(state_.query.relation),
                                emb_->type.col(state_.query.tgt_type));
  candidates_ = env_->candidate_actions(state_);
  log_probs_ = nn::log_softmax<double>(
      action_scores(*p_, enc, decision_matrix(*emb_, candidates_, state_.current_type)));
}

void PolicyCursor::advance(std::size_t candidate_index) {
  if (candidate_index >= candidates_.size()) throw ContractError("candidate index out of range");
  const Action a = candidates_[candidate_index];
  state_ = env_->step(state_, a);
  prev_rel_ = action_relation_vector(*emb_, a);
  refresh();
}

void RolloutBatch::append(RolloutBatch&& o) {
  auto move_into = [](auto& dst, auto& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
  };
  move_into(trajectories, o.trajectories);
  move_into(rewards, o.rewards);
  move_into(entropies, o.entropies);
  move_into(coverage, o.coverage);
  move_into(confidence, o.confidence);
}

// ------------------------------------------------------- forward with caches

namespace {

struct StepTape {
  std::array<nn::LstmCache<double>, 2> lstm;
  VectorXd enc, a1, u;
  MatrixXd decision;
  VectorXd p, log_p;
  double entropy = 0.0;
  Eigen::Index chosen = 0;
};

std::vector<StepTape> forward_tape(const PolicyParams& p, const EmbeddingTable& emb,
                                   const SchemaEnv& env, const Trajectory& tr) {
  std::vector<StepTape> tape(tr.steps.size());
  RecurrentState rec = RecurrentState::zeros(p.dims.hidden_dim);
  VectorXd prev_rel = emb.start;
  const VectorXd r_q = emb.relation.col(tr.query.relation);
  const VectorXd t_tgt = emb.type.col(tr.query.tgt_type);
  VectorXd x(p.dims.input_width());
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const TrajectoryStep& st = tr.steps[i];
    StepTape& k = tape[i];
    const VectorXd t_cur = emb.type.col(st.state.current_type);
    x << prev_rel, t_cur;
    nn::lstm_forward<double>(p.lstm[0].weight, p.lstm[0].bias, x, rec.h[0], rec.c[0], &k.lstm[0]);
    nn::lstm_forward<double>(p.lstm[1].weight, p.lstm[1].bias, rec.h[0], rec.h[1], rec.c[1],
                             &k.lstm[1]);
    k.enc = build_encoding(rec.h[1], t_cur, r_q, t_tgt);
    auto cands = env.candidate_actions(st.state);
    auto it = std::find(cands.begin(), cands.end(), st.action);
    if (it == cands.end())
      throw ContractError("trajectory step " + std::to_string(i) + " took an illegal action");
    k.chosen = it - cands.begin();
    k.decision = decision_matrix(emb, cands, st.state.current_type);
    k.a1 = p.w1 * k.enc + p.b1;
    k.u = nn::relu(k.a1);
    VectorXd out = p.w2 * k.u + p.b2;
    k.log_p = nn::log_softmax<double>(k.decision * out);
    k.p = k.log_p.array().exp().matrix();
    k.entropy = nn::entropy<double>(k.p, k.log_p);
    prev_rel = action_relation_vector(emb, st.action);
  }
  return tape;
}

void check_batch(const RolloutBatch& b) {
  if (b.trajectories.empty()) throw ContractError("empty rollout batch");
  if (b.rewards.size() != b.trajectories.size())
    throw ContractError("rollout batch rewards and trajectories disagree in length");
}

}  // namespace

LogProbEntropy trajectory_log_prob_entropy(const PolicyParams& p, const EmbeddingTable& emb,
                                           const SchemaEnv& env, const Trajectory& tr) {
  LogProbEntropy out;
  for (const StepTape& k : forward_tape(p, emb, env, tr)) {
    out.log_prob += k.log_p[k.chosen];
    out.entropy += k.entropy;
  }
  return out;
}

double policy_loss(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                   const RolloutBatch& batch, double baseline, double beta) {
  check_batch(batch);
  const double B = static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    LogProbEntropy le = trajectory_log_prob_entropy(p, emb, env, batch.trajectories[j]);
    loss += -(batch.rewards[j] - baseline) * le.log_prob / B - beta * le.entropy / B;
  }
  return loss;
}

namespace {

// Adds the gradient contributions of trajectories [lo, hi) into g.
void accumulate_gradients(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                          const RolloutBatch& batch, double baseline, double beta, std::size_t lo,
                          std::size_t hi, PolicyParams& g) {
  const int H = p.dims.hidden_dim;
  const double B = static_cast<double>(batch.size());
  VectorXd dx, dh_prev, dc_prev;
  for (std::size_t j = lo; j < hi; ++j) {
    const Trajectory& tr = batch.trajectories[j];
    const std::vector<StepTape> tape = forward_tape(p, emb, env, tr);
    const double coef = -(batch.rewards[j] - baseline) / B;
    const double ent_coef = beta / B;
    std::array<VectorXd, 2> dh_next{VectorXd::Zero(H), VectorXd::Zero(H)};
    std::array<VectorXd, 2> dc_next{VectorXd::Zero(H), VectorXd::Zero(H)};
    for (std::size_t i = tape.size(); i-- > 0;) {
      const StepTape& k = tape[i];
      VectorXd ds = -coef * k.p;
      ds[k.chosen] += coef;
      ds += ent_coef * k.p.cwiseProduct((k.log_p.array() + k.entropy).matrix());
      VectorXd dout = k.decision.transpose() * ds;
      g.w2.noalias() += dout * k.u.transpose();
      g.b2 += dout;
      VectorXd da1 = (p.w2.transpose() * dout).cwiseProduct((k.a1.array() > 0.0).cast<double>().matrix());
      g.w1.noalias() += da1 * k.enc.transpose();
      g.b1 += da1;
      VectorXd dh = (p.w1.transpose() * da1).head(H) + dh_next[1];
      nn::lstm_backward<double>(p.lstm[1].weight, k.lstm[1], dh, dc_next[1], g.lstm[1].weight,
                                g.lstm[1].bias, dx, dh_prev, dc_prev);
      dh_next[1] = dh_prev;
      dc_next[1] = dc_prev;
      dh = dx + dh_next[0];
      nn::lstm_backward<double>(p.lstm[0].weight, k.lstm[0], dh, dc_next[0], g.lstm[0].weight,
                                g.lstm[0].bias, dx, dh_prev, dc_prev);
      dh_next[0] = dh_prev;
      dc_next[0] = dc_prev;
      if (!ds.allFinite() || !dh_next[0].allFinite() || !dc_next[0].allFinite())
        throw NumericError("non-finite gradient at trajectory " + std::to_string(j) + ", step " +
                           std::to_string(i));
    }
  }
}

}  // namespace

PolicyParams policy_gradients(const PolicyParams& p, const EmbeddingTable& emb,
                              const SchemaEnv& env, const RolloutBatch& batch, double baseline,
                              double beta, int threads) {
  check_batch(batch);
  const std::size_t chunks = std::min<std::size_t>(batch.size(), static_cast<std::size_t>(std::max(1, threads)));
  std::vector<PolicyParams> partial(chunks, PolicyParams::zeros(p.dims));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t lo = batch.size() * c / chunks;
    const std::size_t hi = batch.size() * (c + 1) / chunks;
    accumulate_gradients(p, emb, env, batch, baseline, beta, lo, hi, partial[c]);
  });
  PolicyParams g = std::move(partial[0]);
  auto gv = flat_views(g);
  for (std::size_t c = 1; c < chunks; ++c) {
    auto pv = flat_views(partial[c]);
    for (std::size_t k = 0; k < gv.size(); ++k) gv[k] += pv[k];
  }
  return g;
}

// ------------------------------------------------------------------------ Adam

AdamState AdamState::zeros(PolicyDims dims) {
  return AdamState{PolicyParams::zeros(dims), PolicyParams::zeros(dims), 0};
}

void adam_update(PolicyParams& p, const PolicyParams& grads, AdamState& state, const AdamConfig& cfg) {
  if (!(p.dims == grads.dims) || !(p.dims == state.m.dims))
    throw ContractError("adam_update shape mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  auto pv = flat_views(p);
  auto gv = flat_views(const_cast<PolicyParams&>(grads));
  auto mv = flat_views(state.m);
  auto vv = flat_views(state.v);
  for (std::size_t k = 0; k < pv.size(); ++k) {
    mv[k] = cfg.beta1 * mv[k] + (1.0 - cfg.beta1) * gv[k];
    vv[k] = cfg.beta2 * vv[k] + (1.0 - cfg.beta2) * gv[k].cwiseAbs2();
    pv[k].array() -= cfg.alpha * (mv[k].array() / bc1) / ((vv[k].array() / bc2).sqrt() + cfg.eps);
  }
}

// -------------------------------------------------------------------------- IO

void write_params(std::ostream& out, const PolicyParams& p) {
  bin::put_u32(out, static_cast<std::uint32_t>(p.dims.embed_dim));
  bin::put_u32(out, static_cast<std::uint32_t>(p.dims.hidden_dim));
  p.for_each_tensor([&](std::string_view, const auto& t) { bin::put_matrix(out, t); });
}

PolicyParams read_params(std::istream& in) {
  PolicyDims d;
  d.embed_dim = static_cast<int>(bin::get_u32(in));
  d.hidden_dim = static_cast<int>(bin::get_u32(in));
  PolicyParams p = PolicyParams::zeros(d);
  p.for_each_tensor([&](std::string_view name, auto& t) {
    const auto rows = t.rows();
    const auto cols = t.cols();
    bin::get_matrix(in, t);
    if (t.rows() != rows || t.cols() != cols)
      throw DataError("tensor '" + std::string(name) + "' has the wrong shape");
  });
  return p;
}

}  // namespace hinwalk
