#pragma once

// Per-relation link prediction from mined meta-paths: dataset preparation,
// tail-corruption negatives, similarity features, lasso regression, ROC-AUC
// and average precision.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/inference.hpp"

namespace hinwalk {

struct LPDataset {
  RelationId relation = 0;
  std::vector<EntityPair> train_pos;
  std::vector<EntityPair> test_pos;
  std::vector<EntityPair> train_neg;
  std::vector<EntityPair> test_neg;
};

struct PreparedRelation {
  LPDataset dataset;
  InstanceGraph graph;  // input graph minus the test facts
};

// True iff `tail` is reachable from `head` within max_hops instance edges
// without using a relation-r_q (or inverse) edge between the two of them.
bool has_alternate_path(const InstanceGraph& g, EntityPair pair, RelationId r_q, int max_hops);

// Positives with an alternate path of at most l-1 hops, split by a seeded
// shuffle into floor(n * test_ratio) test pairs and the rest for training.
// Negatives are left empty.
PreparedRelation prepare_dataset(const InstanceGraph& g, RelationId r_q, int l, double test_ratio,
                                 std::uint64_t seed);

// floor(|positives| / 2) tail corruptions, drawn from the entities sharing a
// type with the original tail and rejected when the corrupted pair is a true
// r_q pair in g. Positives whose corruption fails are skipped with a warning.
std::vector<EntityPair> generate_negatives(std::span<const EntityPair> positives,
                                           const InstanceGraph& g, RelationId r_q,
                                           std::uint64_t seed,
                                           std::vector<std::string>* warnings = nullptr);

// prepare_dataset followed by train and test negatives.
PreparedRelation prepare_relation(const InstanceGraph& g, RelationId r_q, int l, double test_ratio,
                                  std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

enum class SimilarityMode { SumConf, MetaCount, ConfFeat, BinaryFeat };

std::string_view to_string(SimilarityMode m);
SimilarityMode parse_similarity_mode(std::string_view s);  // throws ConfigError
inline bool is_scalar_mode(SimilarityMode m) {
  return m == SimilarityMode::SumConf || m == SimilarityMode::MetaCount;
}

// Indicator matrix: rows are pairs, column i is 1 iff mined path i connects.
Eigen::MatrixXd connectivity_matrix(std::span<const EntityPair> pairs, const MinedPathSet& mined,
                                    const InstanceGraph& g, int threads = 1);

// One row per pair: one column for the scalar modes, |mined| for the others.
Eigen::MatrixXd pair_features(std::span<const EntityPair> pairs, const MinedPathSet& mined,
                              const InstanceGraph& g, SimilarityMode mode, int threads = 1);
Eigen::VectorXd pair_features(EntityPair pair, const MinedPathSet& mined, const InstanceGraph& g,
                              SimilarityMode mode);

struct LassoModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int sweeps = 0;
  bool converged = false;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Minimizes (1/2n)||y - Xw - b||^2 + reg_weight ||w||_1 by cyclic coordinate
// descent on centered data. Zero-variance columns get weight 0.
LassoModel fit_l1_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double reg_weight,
                             int max_sweeps = 1000, double tol = 1e-6);

struct LPMetrics {
  double roc_auc = 0.0;
  double ap = 0.0;
};

LPMetrics evaluate_lp(std::span<const double> scores, std::span<const int> labels);

struct LPConfig {
  SimilarityMode mode = SimilarityMode::SumConf;
  double reg_weight = 0.01;
  int max_sweeps = 1000;
  double tol = 1e-6;
  int threads = 1;
};

struct LPRun {
  LPMetrics metrics;
  std::vector<EntityPair> pairs;  // test positives then test negatives
  std::vector<int> labels;
  std::vector<double> scores;
};

// Features on the prepared (test-removed) graph; scalar modes score the test
// pairs directly, vector modes through a lasso fitted on the training pairs.
LPRun run_link_prediction(const LPDataset& data, const InstanceGraph& g, const MinedPathSet& mined,
                          const LPConfig& cfg);

struct RemovalRow {
  double rate = 0.0;
  std::size_t removed = 0;
  std::vector<EntityId> removed_entities;
  LPMetrics metrics;
};

// Samples `sample_fraction` of the test positives, collects their entities,
// removes the first ceil(rate * count) of them (in a seeded order) from the
// prepared graph, re-scores the mined meta-paths and reruns link prediction.
std::vector<RemovalRow> node_removal_study(const PreparedRelation& prep,
                                           std::span<const MetaPath> paths,
                                           std::span<const double> rates, const LPConfig& cfg,
                                           double sample_fraction, std::uint64_t seed);

// `head<TAB>tail` files with entity names.
void write_pairs(std::ostream& out, std::span<const EntityPair> pairs, const InstanceGraph& g);
std::vector<EntityPair> read_pairs(std::istream& in, const InstanceGraph& g,
                                   const std::string& name = "pairs");

}  // namespace hinwalk
