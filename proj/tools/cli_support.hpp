#pragma once

// Plumbing shared by the hinwalk subcommands: flat key=value configuration,
// content hashes, run manifests and the prepared-dataset layout.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hinwalk/graph.hpp"
#include "hinwalk/linkpred.hpp"
#include "hinwalk/policy.hpp"
#include "hinwalk/trainer.hpp"

namespace hinwalk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Setting { PerRelationTransductive, MultiRelationTransductive, MultiRelationInductive };

std::string to_string(Setting s);
Setting parse_setting(const std::string& s);

struct ExperimentConfig {
  TrainConfig train;
  PolicyDims dims;
  std::size_t beam_width = 400;
  Setting setting = Setting::MultiRelationTransductive;
  std::vector<std::string> train_relations;
  std::vector<std::string> test_relations;
  SimilarityMode mode = SimilarityMode::SumConf;
  double reg_weight = 0.01;
  int max_len = 5;  // node types on a dataset-preparation alternate path
  double test_ratio = 0.2;
  int embed_epochs = 200;
  double sample_fraction = 0.4;
  std::uint64_t seed = 1;

  // Applies one key=value pair; unknown keys and bad values throw ConfigError.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  // Cross-field checks, including the relation lists against the setting.
  void validate() const;
  std::map<std::string, std::string> echo() const;
  // Relations prepared and evaluated: test relations, falling back to train.
  std::vector<std::string> evaluated_relations() const;
};

// Git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string blob_hash(const std::string& content);
std::string file_hash(const fs::path& p);
// Hash over sorted (relative path, blob hash) lines of every regular file
// except run manifests.
std::string directory_digest(const fs::path& dir);

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& content);
// Throws DataError naming the artifact and the command that produces it.
void require(const fs::path& p, const std::string& what, const std::string& producer);

class RunManifest {
 public:
  RunManifest(std::string command, const ExperimentConfig& cfg, int threads);
  void input(const fs::path& p);
  void output(const fs::path& p);
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }
  // Writes <dir>/run-<command>.json with the elapsed wall time.
  void write(const fs::path& dir) const;

 private:
  std::string command_;
  json config_;
  std::uint64_t seed_;
  int threads_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  json extra_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

// A prepared dataset directory: train.tsv (graph minus every held-out test
// fact), types.tsv, test.tsv and per-relation pair files under pairs/.
struct Workspace {
  InstanceGraph graph;  // inverse-augmented training graph
  SchemaGraph schema;
  fs::path dir;

  RelationId relation(const std::string& name) const;
  std::vector<Triple> test_triples() const;
  LPDataset dataset(const std::string& relation) const;
};

Workspace load_workspace(const fs::path& dir);
fs::path pairs_path(const fs::path& dir, const std::string& relation, const std::string& split);

std::vector<std::string> split_list(const std::string& s);

}  // namespace hinwalk::cli
