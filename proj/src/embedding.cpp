#include "hinwalk/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "hinwalk/binary_io.hpp"
#include "hinwalk/errors.hpp"

namespace hinwalk {

bool EmbeddingTable::all_finite() const {
  return entity.allFinite() && relation.allFinite() && type.allFinite() && start.allFinite() &&
         stay.allFinite();
}

bool EmbeddingTable::operator==(const EmbeddingTable& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
  };
  return same(entity, o.entity) && same(relation, o.relation) && same(type, o.type) &&
         same(start, o.start) && same(stay, o.stay);
}

namespace {

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double n = m.col(j).norm();
    if (n > 0.0) m.col(j) /= n;
  }
}

Eigen::VectorXd translation_residual(const EmbeddingTable& tab, const Triple& tr) {
  return tab.entity.col(tr.head) + tab.relation.col(tr.relation) - tab.entity.col(tr.tail);
}

// d||x||/dx, zero at the origin.
Eigen::VectorXd unit_or_zero(const Eigen::VectorXd& x) {
  double n = x.norm();
  if (n < 1e-12) return Eigen::VectorXd::Zero(x.size());
  return x / n;
}

void accumulate(std::map<std::int32_t, Eigen::VectorXd>& grads, std::int32_t id,
                const Eigen::VectorXd& g) {
  auto [it, inserted] = grads.try_emplace(id, g);
  if (!inserted) it->second += g;
}

void clip(Eigen::VectorXd& g, double max_norm) {
  double n = g.norm();
  if (n > max_norm) g *= max_norm / n;
}

}  // namespace

double translation_distance(const EmbeddingTable& tab, const Triple& tr) {
  return translation_residual(tab, tr).norm();
}

double margin_ranking_loss(const EmbeddingTable& tab, const Triple& pos, const Triple& neg,
                           double margin) {
  return std::max(0.0, margin + translation_distance(tab, pos) - translation_distance(tab, neg));
}

EmbeddingTable train_translation_embeddings(const InstanceGraph& g, const TranslationConfig& cfg,
                                            TranslationHistory* history) {
  if (cfg.dim <= 0) throw ConfigError("embedding dimension must be positive");
  if (cfg.epochs <= 0) throw ConfigError("epochs must be positive");
  if (cfg.batch_size <= 0 || cfg.negatives_per_positive <= 0)
    throw ConfigError("batch size and negatives per positive must be positive");
  if (g.triples().empty() || g.num_entities() < 2)
    throw DataError("translation embeddings need a non-empty graph");

  std::mt19937_64 rng(cfg.seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
  EmbeddingTable tab;
  tab.entity = uniform_matrix(cfg.dim, static_cast<Eigen::Index>(g.entity_id_count()), bound, rng);
  tab.relation = uniform_matrix(cfg.dim, static_cast<Eigen::Index>(g.num_relations()), bound, rng);
  tab.start = uniform_matrix(cfg.dim, 1, bound, rng).col(0);
  tab.stay = uniform_matrix(cfg.dim, 1, bound, rng).col(0);
  normalize_columns(tab.entity);
  normalize_columns(tab.relation);

  const std::vector<EntityId> present = g.entities();
  std::uniform_int_distribution<std::size_t> pick_entity(0, present.size() - 1);
  std::bernoulli_distribution corrupt_head(0.5);
  std::vector<std::size_t> order(g.triples().size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto corrupt = [&](const Triple& pos) {
    Triple neg = pos;
    for (int attempt = 0; attempt < 10; ++attempt) {
      neg = pos;
      EntityId e = present[pick_entity(rng)];
      if (corrupt_head(rng))
        neg.head = e;
      else
        neg.tail = e;
      if (neg != pos && !g.contains(neg)) break;
    }
    return neg;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t loss_n = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::map<std::int32_t, Eigen::VectorXd> ent_grad, rel_grad;
      for (std::size_t k = start; k < stop; ++k) {
        const Triple& pos = g.triples()[order[k]];
        for (int n = 0; n < cfg.negatives_per_positive; ++n) {
          Triple neg = corrupt(pos);
          Eigen::VectorXd rp = translation_residual(tab, pos);
          Eigen::VectorXd rn = translation_residual(tab, neg);
          double loss = cfg.margin + rp.norm() - rn.norm();
          ++loss_n;
          if (loss <= 0.0) continue;
          loss_sum += loss;
          Eigen::VectorXd up = unit_or_zero(rp);
          Eigen::VectorXd un = unit_or_zero(rn);
          accumulate(ent_grad, pos.head, up);
          accumulate(ent_grad, pos.tail, -up);
          accumulate(rel_grad, pos.relation, up - un);
          accumulate(ent_grad, neg.head, -un);
          accumulate(ent_grad, neg.tail, un);
        }
      }
      for (auto& [id, grad] : ent_grad) {
        clip(grad, 1.0);
        tab.entity.col(id) -= cfg.learning_rate * grad;
        double n = tab.entity.col(id).norm();
        if (n > 0.0) tab.entity.col(id) /= n;
      }
      for (auto& [id, grad] : rel_grad) {
        clip(grad, 1.0);
        tab.relation.col(id) -= cfg.learning_rate * grad;
      }
    }
    if (history) {
      history->epoch_loss.push_back(loss_n ? loss_sum / static_cast<double>(loss_n) : 0.0);
      double dist = 0.0;
      for (const Triple& tr : g.triples()) dist += translation_distance(tab, tr);
      history->epoch_distance.push_back(dist / static_cast<double>(g.triples().size()));
    }
  }
  if (!tab.all_finite()) throw NumericError("translation embeddings became non-finite");
  return tab;
}

EmbeddingTable pool_type_embeddings(EmbeddingTable tab, const InstanceGraph& g) {
  if (tab.entity.cols() != static_cast<Eigen::Index>(g.entity_id_count()))
    throw ContractError("embedding table does not match the graph's entity count");
  tab.type.resize(tab.entity.rows(), static_cast<Eigen::Index>(g.num_types()));
  for (TypeId t = 0; t < static_cast<TypeId>(g.num_types()); ++t) {
    auto members = g.members(t);
    if (members.empty())
      throw DataError("type '" + g.type_vocab().name(t) + "' has no member entities to pool");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(tab.entity.rows());
    for (EntityId e : members) sum += tab.entity.col(e);
    tab.type.col(t) = sum / static_cast<double>(members.size());
  }
  return tab;
}

EmbeddingTable random_init(std::size_t n_types, std::size_t n_relations, int dim,
                           std::uint64_t seed) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
  std::mt19937_64 rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  EmbeddingTable tab;
  tab.type = uniform_matrix(dim, static_cast<Eigen::Index>(n_types), bound, rng);
  tab.relation = uniform_matrix(dim, static_cast<Eigen::Index>(n_relations), bound, rng);
  tab.start = uniform_matrix(dim, 1, bound, rng).col(0);
  tab.stay = uniform_matrix(dim, 1, bound, rng).col(0);
  tab.entity.resize(dim, 0);
  return tab;
}

// ------------------------------------------------------------------------ IO

namespace {

constexpr char kEmbeddingMagic[8] = {'H', 'W', 'E', 'M', 'B', '0', '0', '1'};

using bin::get_f32;
using bin::get_u32;
using bin::put_f32;
using bin::put_u32;

void put_columns(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) put_f32(out, m(i, j));
}

Eigen::MatrixXd get_columns(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = get_f32(in);
  return m;
}

}  // namespace

void write_embeddings(const std::string& path, const EmbeddingTable& tab, const InstanceGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file '" + path + "'");
  out.write(kEmbeddingMagic, sizeof kEmbeddingMagic);
  put_u32(out, static_cast<std::uint32_t>(tab.dim()));
  put_u32(out, static_cast<std::uint32_t>(tab.entity.cols()));
  put_u32(out, static_cast<std::uint32_t>(tab.relation.cols()));
  put_u32(out, static_cast<std::uint32_t>(tab.type.cols()));
  put_columns(out, tab.entity);
  put_columns(out, tab.relation);
  put_columns(out, tab.start);
  put_columns(out, tab.stay);
  put_columns(out, tab.type);

  std::ofstream idx(path + ".index.tsv");
  if (!idx) throw DataError("cannot write embedding index '" + path + ".index.tsv'");
  std::size_t row = 0;
  for (Eigen::Index e = 0; e < tab.entity.cols(); ++e, ++row)
    idx << "entity\t" << g.entity_vocab().name(static_cast<EntityId>(e)) << '\t' << row << '\n';
  for (Eigen::Index r = 0; r < tab.relation.cols(); ++r, ++row)
    idx << "relation\t" << g.relation_vocab().name(static_cast<RelationId>(r)) << '\t' << row << '\n';
  idx << "special\tSTART\t" << row++ << '\n';
  idx << "special\tSTAY\t" << row++ << '\n';
  for (Eigen::Index t = 0; t < tab.type.cols(); ++t, ++row)
    idx << "type\t" << g.type_vocab().name(static_cast<TypeId>(t)) << '\t' << row << '\n';
}

EmbeddingTable read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kEmbeddingMagic, 8) != 0)
    throw DataError("'" + path + "' is not an embedding file");
  auto dim = static_cast<Eigen::Index>(get_u32(in));
  auto n_ent = static_cast<Eigen::Index>(get_u32(in));
  auto n_rel = static_cast<Eigen::Index>(get_u32(in));
  auto n_type = static_cast<Eigen::Index>(get_u32(in));
  EmbeddingTable tab;
  tab.entity = get_columns(in, dim, n_ent);
  tab.relation = get_columns(in, dim, n_rel);
  tab.start = get_columns(in, dim, 1).col(0);
  tab.stay = get_columns(in, dim, 1).col(0);
  tab.type = get_columns(in, dim, n_type);
  return tab;
}

}  // namespace hinwalk
