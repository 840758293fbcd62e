#pragma once

// Fixed schema-level representations consumed by the policy: translation
// embeddings trained on the instance graph, mean-pooled into type vectors, or
// a random initialization.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hinwalk/graph.hpp"

namespace hinwalk {

// Vectors are stored column-wise: entity.col(e), relation.col(r), type.col(t).
struct EmbeddingTable {
  Eigen::MatrixXd entity;
  Eigen::MatrixXd relation;
  Eigen::MatrixXd type;
  Eigen::VectorXd start;  // r_0 fed to the encoder at the first step
  Eigen::VectorXd stay;   // relation half of the STAY action's decoder row

  int dim() const { return static_cast<int>(start.size()); }
  bool all_finite() const;
  bool operator==(const EmbeddingTable& o) const;
};

struct TranslationConfig {
  int dim = 64;
  int epochs = 200;
  double margin = 1.0;
  double learning_rate = 0.01;
  int negatives_per_positive = 1;
  int batch_size = 32;
  std::uint64_t seed = 1;
};

struct TranslationHistory {
  std::vector<double> epoch_loss;      // mean hinge loss per (pos, neg) pair
  std::vector<double> epoch_distance;  // mean ||h + r - t|| over positives, end of epoch
};

// L2 translation distance ||h + r - t||.
double translation_distance(const EmbeddingTable& tab, const Triple& tr);

// max(0, margin + d(pos) - d(neg)).
double margin_ranking_loss(const EmbeddingTable& tab, const Triple& pos, const Triple& neg,
                           double margin);

// Margin-ranking translation embeddings with uniform head-or-tail corruption.
// Entity vectors are renormalized to unit length after every update and
// per-vector gradients are clipped to norm 1. Type vectors are left empty;
// START and STAY get seeded uniform vectors.
EmbeddingTable train_translation_embeddings(const InstanceGraph& g, const TranslationConfig& cfg,
                                            TranslationHistory* history = nullptr);

// type.col(t) = mean of entity.col(e) over present members e of t.
EmbeddingTable pool_type_embeddings(EmbeddingTable tab, const InstanceGraph& g);

// i.i.d. uniform in [-6/sqrt(d), 6/sqrt(d)] for types, relations, START, STAY.
EmbeddingTable random_init(std::size_t n_types, std::size_t n_relations, int dim,
                           std::uint64_t seed);

// Binary file: "HWEMB001", u32 dim, u32 entity/relation/type counts, then
// little-endian float32 rows (entities, relations, START, STAY, types). A
// sidecar `<path>.index.tsv` maps `kind<TAB>name` to row numbers.
void write_embeddings(const std::string& path, const EmbeddingTable& tab, const InstanceGraph& g);
EmbeddingTable read_embeddings(const std::string& path);

}  // namespace hinwalk
