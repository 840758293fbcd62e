#pragma once

// Encoder-decoder policy over schema actions: a two-layer recurrent encoder of
// the walk history, an MLP head, and a dot-product decoder against candidate
// [relation ∥ type] rows. Gradients of the REINFORCE objective are computed
// by hand through the unrolled episode.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "hinwalk/embedding.hpp"
#include "hinwalk/env.hpp"

namespace hinwalk {

struct PolicyDims {
  int embed_dim = 64;
  int hidden_dim = 200;

  int input_width() const { return 2 * embed_dim; }
  int encoding_width() const { return hidden_dim + 3 * embed_dim; }
  bool operator==(const PolicyDims&) const = default;
};

struct LstmLayer {
  Eigen::MatrixXd weight;  // 4H x (in + H), gate blocks i, f, g, o
  Eigen::VectorXd bias;    // 4H
};

struct PolicyParams {
  PolicyDims dims;
  std::array<LstmLayer, 2> lstm;
  Eigen::MatrixXd w1;  // d_h x (d_h + 3 d_e)
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // 2 d_e x d_h
  Eigen::VectorXd b2;

  static PolicyParams zeros(PolicyDims dims);
  // Uniform in +-1/sqrt(fan_in) per tensor.
  static PolicyParams random(PolicyDims dims, std::uint64_t seed);

  // f(name, tensor) for every parameter tensor in a fixed order.
  template <class F>
  void for_each_tensor(F&& f) {
    f("lstm0.weight", lstm[0].weight);
    f("lstm0.bias", lstm[0].bias);
    f("lstm1.weight", lstm[1].weight);
    f("lstm1.bias", lstm[1].bias);
    f("w1", w1);
    f("b1", b1);
    f("w2", w2);
    f("b2", b2);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    const_cast<PolicyParams*>(this)->for_each_tensor(
        [&](std::string_view name, const auto& t) { f(name, t); });
  }

  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const PolicyParams& o) const;
};

// Hidden and cell vectors of both recurrent layers.
struct RecurrentState {
  std::array<Eigen::VectorXd, 2> h;
  std::array<Eigen::VectorXd, 2> c;

  static RecurrentState zeros(int hidden_dim);
};

// Feeds [prev_rel ∥ cur_type] through both layers; returns the new state and
// the top-layer output S_i.
std::pair<RecurrentState, Eigen::VectorXd> encode_step(const PolicyParams& p,
                                                       const RecurrentState& prev,
                                                       const Eigen::VectorXd& prev_rel,
                                                       const Eigen::VectorXd& cur_type);

// [S ∥ t_i ∥ r_q ∥ (t_tgt - r_q)]
Eigen::VectorXd build_encoding(const Eigen::VectorXd& s, const Eigen::VectorXd& t_i,
                               const Eigen::VectorXd& r_q, const Eigen::VectorXd& t_tgt);

// Rows [r_c ∥ t_c]; STAY uses the STAY vector and the current type.
Eigen::MatrixXd decision_matrix(const EmbeddingTable& emb, const std::vector<Action>& candidates,
                                TypeId current_type);

// Raw decoder scores D * (W2 relu(W1 enc + b1) + b2).
Eigen::VectorXd action_scores(const PolicyParams& p, const Eigen::VectorXd& enc,
                              const Eigen::MatrixXd& decision);
Eigen::VectorXd action_distribution(const PolicyParams& p, const Eigen::VectorXd& enc,
                                    const Eigen::MatrixXd& decision);

// Relation vector fed to the encoder after taking `a`.
Eigen::VectorXd action_relation_vector(const EmbeddingTable& emb, const Action& a);

// Incremental forward pass used for sampling and beam search.
class PolicyCursor {
 public:
  PolicyCursor(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
               const Query& q);

  const State& state() const { return state_; }
  bool done() const { return env_->is_terminal(state_); }
  const std::vector<Action>& candidates() const { return candidates_; }
  // Log-probabilities over candidates() at the current state.
  const Eigen::VectorXd& log_probs() const { return log_probs_; }
  void advance(std::size_t candidate_index);

 private:
  void refresh();

  const PolicyParams* p_;
  const EmbeddingTable* emb_;
  const SchemaEnv* env_;
  State state_;
  RecurrentState rec_;
  Eigen::VectorXd prev_rel_;
  std::vector<Action> candidates_;
  Eigen::VectorXd log_probs_;
};

// Sampled trajectories with their terminal rewards and per-step entropies.
struct RolloutBatch {
  std::vector<Trajectory> trajectories;
  std::vector<double> rewards;
  std::vector<std::vector<double>> entropies;
  std::vector<double> coverage;
  std::vector<double> confidence;

  std::size_t size() const { return trajectories.size(); }
  void append(RolloutBatch&& other);
};

struct LogProbEntropy {
  double log_prob = 0.0;
  double entropy = 0.0;
};

LogProbEntropy trajectory_log_prob_entropy(const PolicyParams& p, const EmbeddingTable& emb,
                                           const SchemaEnv& env, const Trajectory& tr);

// L = -(1/B) sum_j (R_j - b) sum_i ln pi(A_i^j) - beta (1/B) sum_j sum_i H_i^j
double policy_loss(const PolicyParams& p, const EmbeddingTable& emb, const SchemaEnv& env,
                   const RolloutBatch& batch, double baseline, double beta);

// dL/dtheta for the loss above, shaped like p. Throws NumericError naming the
// trajectory and step on a non-finite intermediate. Trajectories are split
// into `threads` contiguous chunks whose partial sums are added in order.
PolicyParams policy_gradients(const PolicyParams& p, const EmbeddingTable& emb,
                              const SchemaEnv& env, const RolloutBatch& batch, double baseline,
                              double beta, int threads = 1);

struct AdamState {
  PolicyParams m;
  PolicyParams v;
  std::int64_t t = 0;

  static AdamState zeros(PolicyDims dims);
};

struct AdamConfig {
  double alpha = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_update(PolicyParams& p, const PolicyParams& grads, AdamState& state,
                 const AdamConfig& cfg = {});

// Little-endian binary tensor IO shared by checkpoints.
void write_params(std::ostream& out, const PolicyParams& p);
PolicyParams read_params(std::istream& in);

}  // namespace hinwalk
