// hinwalk: command-line front end. Exit codes: 0 ok, 2 configuration,
// 3 data, 4 numeric failure, 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli_support.hpp"
#include "hinwalk/baselines.hpp"
#include "hinwalk/embedding.hpp"
#include "hinwalk/errors.hpp"
#include "hinwalk/inference.hpp"
#include "hinwalk/linkpred.hpp"
#include "hinwalk/parallel.hpp"
#include "hinwalk/synthetic.hpp"
#include "hinwalk/trainer.hpp"

using namespace hinwalk;
using namespace hinwalk::cli;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = default_thread_count();
  std::string data;
  std::string out;
};

ExperimentConfig build_config(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg.load_file(c.config_path);
  for (const auto& kv : c.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.train.threads = std::max(1, c.threads);
  cfg.validate();
  return cfg;
}

std::vector<std::string> relation_union(const ExperimentConfig& cfg) {
  std::vector<std::string> out = cfg.train_relations;
  for (const auto& r : cfg.test_relations)
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  if (out.empty()) throw ConfigError("no relations configured (set train_relations and/or test_relations)");
  return out;
}

std::string safe(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return out;
}

std::string pairs_text(std::span<const EntityPair> pairs, const InstanceGraph& g) {
  std::ostringstream os;
  write_pairs(os, pairs, g);
  return os.str();
}

std::map<RelationId, MinedPathSet> load_mined(const fs::path& p, const Workspace& ws) {
  require(p, "mined meta-paths", "infer (or baseline)");
  std::ifstream in(p);
  return read_mined(in, ws.graph, p.string());
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

// ------------------------------------------------------------------ generate

int cmd_generate(const std::string& fixture, std::uint64_t seed, const fs::path& out) {
  InstanceGraph g;
  json info;
  info["fixture"] = fixture;
  info["seed"] = seed;
  auto planted = [&](const PlantedFixture& fx) {
    g = fx.graph;
    for (std::size_t i = 0; i < fx.targets.size(); ++i) {
      json row;
      row["relation"] = g.relation_vocab().name(fx.targets[i]);
      if (i < fx.planted.size()) row["planted"] = format_metapath(fx.planted[i], g);
      info["targets"].push_back(row);
    }
  };
  if (fixture == "toy") {
    g = make_toy_graph();
  } else if (fixture == "citizenship") {
    g = make_citizenship_graph();
  } else if (fixture == "convergence") {
    planted(make_convergence_fixture(50, 20, 10, seed));
  } else if (fixture == "schema-complex") {
    planted(make_schema_complex_fixture(30, 20, 8, 2, seed));
  } else if (fixture == "transfer") {
    planted(make_transfer_fixture(8, 8, 30, seed));
  } else if (fixture == "random") {
    g = make_random_hin({}, seed);
  } else {
    throw ConfigError("unknown fixture '" + fixture +
                      "' (expected toy, citizenship, convergence, schema-complex, transfer or random)");
  }
  std::ostringstream t, y;
  write_triples(t, g);
  write_types(y, g);
  write_file(out / "triples.tsv", t.str());
  write_file(out / "types.tsv", y.str());
  write_json(out / "fixture.json", info);
  std::cout << "wrote " << g.triples().size() << " triples over " << g.num_entities() << " entities to "
            << out.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------- prepare

int cmd_prepare(const Common& c) {
  ExperimentConfig cfg = build_config(c);
  const fs::path in(c.data), out(c.out);
  const fs::path triples = fs::exists(in / "triples.tsv") ? in / "triples.tsv" : in / "train.tsv";
  require(triples, "input triples", "generate");
  require(in / "types.tsv", "input entity types", "generate");
  RunManifest run("prepare", cfg, c.threads);
  run.input(triples);
  run.input(in / "types.tsv");

  InstanceGraph g = add_inverse_relations(
      load_instance_graph_files(triples.string(), (in / "types.tsv").string()));
  json manifest;
  manifest["config"] = cfg.echo();
  manifest["seed"] = cfg.seed;
  manifest["inputs"][triples.filename().string()] = file_hash(triples);
  manifest["inputs"]["types.tsv"] = file_hash(in / "types.tsv");
  std::vector<Triple> held_out;
  std::vector<std::string> warnings;
  const auto relations = relation_union(cfg);
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const std::string& name = relations[i];
    auto r = g.relation_vocab().find(name);
    if (!r) throw DataError("relation '" + name + "' does not occur in " + triples.string());
    PreparedRelation prep = prepare_relation(g, *r, cfg.max_len, cfg.test_ratio, cfg.seed + i, &warnings);
    const LPDataset& d = prep.dataset;
    for (const EntityPair& p : d.test_pos) held_out.push_back({p.head, *r, p.tail});
    write_file(pairs_path(out, name, "train_pos"), pairs_text(d.train_pos, g));
    write_file(pairs_path(out, name, "test_pos"), pairs_text(d.test_pos, g));
    write_file(pairs_path(out, name, "train_neg"), pairs_text(d.train_neg, g));
    write_file(pairs_path(out, name, "test_neg"), pairs_text(d.test_neg, g));
    manifest["relations"][name] = {{"train_pos", d.train_pos.size()},
                                   {"test_pos", d.test_pos.size()},
                                   {"train_neg", d.train_neg.size()},
                                   {"test_neg", d.test_neg.size()}};
  }
  InstanceGraph train_graph = remove_triples(g, held_out);
  std::ostringstream t, y, test;
  write_triples(t, train_graph);
  write_types(y, g);
  for (const Triple& tr : held_out)
    test << g.entity_vocab().name(tr.head) << '\t' << g.relation_vocab().name(tr.relation) << '\t'
         << g.entity_vocab().name(tr.tail) << '\n';
  write_file(out / "train.tsv", t.str());
  write_file(out / "types.tsv", y.str());
  write_file(out / "test.tsv", test.str());
  manifest["warnings"] = warnings;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() != "manifest.json" &&
        e.path().filename().string().rfind("run-", 0) != 0)
      manifest["files"][fs::relative(e.path(), out).generic_string()] = file_hash(e.path());
  write_json(out / "manifest.json", manifest);
  const std::string digest = directory_digest(out);
  run.note("digest", digest);
  run.output(out / "manifest.json");
  run.write(out);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "prepared " << relations.size() << " relation(s), " << held_out.size()
            << " test facts held out; digest " << digest << "\n";
  return 0;
}

// --------------------------------------------------------------------- embed

int cmd_embed(const Common& c, bool random) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  RunManifest run("embed", cfg, c.threads);
  run.input(ws.dir / "train.tsv");
  run.input(ws.dir / "types.tsv");
  EmbeddingTable tab;
  if (random) {
    tab = random_init(ws.graph.num_types(), ws.graph.num_relations(), cfg.dims.embed_dim, cfg.seed);
  } else {
    TranslationConfig tc;
    tc.dim = cfg.dims.embed_dim;
    tc.epochs = cfg.embed_epochs;
    tc.seed = cfg.seed;
    tab = pool_type_embeddings(train_translation_embeddings(ws.graph, tc), ws.graph);
  }
  const fs::path out(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_embeddings(out.string(), tab, ws.graph);
  run.output(out);
  run.note("method", random ? "random" : "translation");
  run.write(out.has_parent_path() ? out.parent_path() : fs::path("."));
  std::cout << "wrote " << (random ? "random" : "translation") << " embeddings (d_e=" << tab.dim() << ") to "
            << out.string() << "\n";
  return 0;
}

// --------------------------------------------------------------------- train

EmbeddingTable load_embeddings_for(const fs::path& p, const Workspace& ws, const ExperimentConfig& cfg) {
  require(p, "embedding table", "embed");
  EmbeddingTable emb = read_embeddings(p.string());
  if (emb.dim() != cfg.dims.embed_dim)
    throw ConfigError("embedding file has d_e=" + std::to_string(emb.dim()) + " but config d_e=" +
                      std::to_string(cfg.dims.embed_dim));
  if (static_cast<std::size_t>(emb.type.cols()) != ws.graph.num_types() ||
      static_cast<std::size_t>(emb.relation.cols()) != ws.graph.num_relations())
    throw DataError("embedding file '" + p.string() + "' does not match the prepared graph");
  return emb;
}

fs::path checkpoint_for(const fs::path& model, const ExperimentConfig& cfg, const std::string& relation) {
  return cfg.setting == Setting::PerRelationTransductive ? model / (safe(relation) + ".ckpt")
                                                         : model / "model.ckpt";
}

void train_group(const Workspace& ws, const EmbeddingTable& emb, const ExperimentConfig& cfg,
                 const std::vector<RelationId>& rels, const fs::path& ckpt, const fs::path& stats_path,
                 bool resume) {
  Trainer trainer(ws.graph, ws.schema, emb, cfg.train, PolicyParams::random(cfg.dims, cfg.seed));
  bool fresh_stats = true;
  if (resume && fs::exists(ckpt)) {
    Checkpoint ck = load_checkpoint(ckpt.string());
    if (ck.relations != rels) throw ConfigError("checkpoint '" + ckpt.string() + "' was trained on other relations");
    if (!(ck.embeddings == emb)) throw ConfigError("checkpoint '" + ckpt.string() + "' used other embeddings");
    trainer.restore(ck.params, ck.adam, ck.rng_state, ck.progress);
    fresh_stats = !fs::exists(stats_path);
    std::cout << "resuming " << ckpt.string() << " after " << ck.progress.blocks_done << " block(s)\n";
  }
  std::ofstream stats(stats_path, fresh_stats ? std::ios::trunc : std::ios::app);
  if (!stats) throw DataError("cannot write '" + stats_path.string() + "'");
  if (fresh_stats) write_stats_header(stats);
  trainer.train_multi_relation(rels, [&](const Trainer& t, std::span<const IterationStats> block) {
    write_stats_rows(stats, block, ws.graph);
    stats.flush();
    save_checkpoint(ckpt.string(), {t.params(), t.adam(), t.embeddings(), t.rng_state(), t.progress(), rels});
    const IterationStats& last = block.back();
    std::cout << "block " << t.progress().blocks_done << " " << ws.graph.relation_vocab().name(last.relation)
              << ": arrival " << std::fixed << std::setprecision(3) << last.arrival << " reward "
              << last.reward << "\n"
              << std::defaultfloat;
  });
  if (!trainer.params().all_finite()) throw NumericError("policy parameters became non-finite");
}

int cmd_train(const Common& c, const std::string& emb_path, bool resume) {
  ExperimentConfig cfg = build_config(c);
  if (cfg.train_relations.empty()) throw ConfigError("train needs train_relations");
  Workspace ws = load_workspace(c.data);
  EmbeddingTable emb = load_embeddings_for(emb_path, ws, cfg);
  const fs::path model(c.out);
  fs::create_directories(model);
  RunManifest run("train", cfg, c.threads);
  run.input(ws.dir / "train.tsv");
  run.input(emb_path);
  if (cfg.setting == Setting::PerRelationTransductive) {
    for (const auto& name : cfg.train_relations) {
      const fs::path ck = checkpoint_for(model, cfg, name);
      train_group(ws, emb, cfg, {ws.relation(name)}, ck, model / (safe(name) + ".stats.csv"), resume);
      run.output(ck);
    }
  } else {
    std::vector<RelationId> rels;
    for (const auto& name : cfg.train_relations) rels.push_back(ws.relation(name));
    const fs::path ck = model / "model.ckpt";
    train_group(ws, emb, cfg, rels, ck, model / "stats.csv", resume);
    run.output(ck);
  }
  run.write(model);
  return 0;
}

// --------------------------------------------------------------------- infer

int cmd_infer(const Common& c, const std::string& model_dir) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  RunManifest run("infer", cfg, c.threads);
  run.input(ws.dir / "train.tsv");
  SchemaEnv env(ws.schema, cfg.train.max_hops);
  std::vector<MinedPathSet> sets;
  for (const auto& name : cfg.evaluated_relations()) {
    const fs::path ck_path = checkpoint_for(model_dir, cfg, name);
    require(ck_path, "trained model", "train");
    Checkpoint ck = load_checkpoint(ck_path.string());
    run.input(ck_path);
    const RelationId r = ws.relation(name);
    auto support = narrow_query_set(type_pairs_for_relation(ws.graph, ws.schema, r), cfg.train.narrow_threshold);
    auto queries = queries_for(r, support);
    EvalCache cache(ws.graph);
    sets.push_back(mine_metapaths(ck.params, ck.embeddings, env, ws.graph, r, queries, cfg.beam_width, &cache));
    std::cout << name << ": " << sets.back().entries.size() << " meta-paths from " << queries.size()
              << " type pair(s)\n";
  }
  std::ostringstream os;
  write_mined(os, sets, ws.graph);
  write_file(c.out, os.str());
  run.output(c.out);
  run.write(fs::path(c.out).has_parent_path() ? fs::path(c.out).parent_path() : fs::path("."));
  return 0;
}

// ------------------------------------------------------------------ baseline

int cmd_baseline(const Common& c, const std::string& method, std::size_t attempts, int multiplier) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  RunManifest run("baseline", cfg, c.threads);
  run.input(ws.dir / "train.tsv");
  std::mt19937_64 rng(cfg.seed);
  std::vector<MinedPathSet> sets;
  json rates = json::object();
  for (const auto& name : cfg.evaluated_relations()) {
    const RelationId r = ws.relation(name);
    auto support = narrow_query_set(type_pairs_for_relation(ws.graph, ws.schema, r), cfg.train.narrow_threshold);
    std::vector<MetaPath> paths;
    for (const Query& q : queries_for(r, support)) {
      std::vector<MetaPath> found;
      if (method == "random-walk")
        found = random_walk_metapaths(ws.schema, q, {attempts, multiplier}, cfg.train.max_hops, rng);
      else if (method == "enumerate")
        found = enumerate_metapaths(ws.schema, q, cfg.train.max_hops);
      else
        throw ConfigError("unknown baseline '" + method + "' (expected random-walk or enumerate)");
      for (MetaPath& m : found)
        if (!is_query_restatement(m, q)) paths.push_back(std::move(m));
    }
    const double rate = paths.empty() ? 0.0 : valid_rate(paths, ws.graph);
    rates[name] = rate;
    sets.push_back(score_metapaths(ws.graph, r, paths));
    std::cout << name << ": " << sets.back().entries.size() << " distinct meta-paths, valid rate "
              << std::setprecision(4) << rate << "\n";
  }
  std::ostringstream os;
  write_mined(os, sets, ws.graph);
  write_file(c.out, os.str());
  run.note("valid_rate", rates);
  run.note("method", method);
  run.output(c.out);
  run.write(fs::path(c.out).has_parent_path() ? fs::path(c.out).parent_path() : fs::path("."));
  return 0;
}

// ------------------------------------------------------------------- eval-qa

json qa_row(const std::string& name, const QAMetrics& m) {
  return {{"relation", name}, {"n", m.n}, {"hits1", m.hits1}, {"hits3", m.hits3}, {"hits10", m.hits10},
          {"mrr", m.mrr}};
}

int cmd_eval_qa(const Common& c, const std::string& mined_path) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  auto mined = load_mined(mined_path, ws);
  RunManifest run("eval-qa", cfg, c.threads);
  run.input(ws.dir / "test.tsv");
  run.input(mined_path);
  const auto all_test = ws.test_triples();
  json rows = json::array();
  std::vector<Triple> pooled;
  for (const auto& name : cfg.evaluated_relations()) {
    const RelationId r = ws.relation(name);
    std::vector<Triple> test;
    std::copy_if(all_test.begin(), all_test.end(), std::back_inserter(test),
                 [&](const Triple& t) { return t.relation == r; });
    if (!mined.count(r)) throw DataError("no mined meta-paths for relation '" + name + "' in " + mined_path);
    rows.push_back(qa_row(name, evaluate_qa(test, mined, ws.graph, c.threads).metrics));
    pooled.insert(pooled.end(), test.begin(), test.end());
  }
  rows.push_back(qa_row("all", evaluate_qa(pooled, mined, ws.graph, c.threads).metrics));
  write_json(c.out, {{"kind", "qa"}, {"rows", rows}});
  run.output(c.out);
  run.write(fs::path(c.out).has_parent_path() ? fs::path(c.out).parent_path() : fs::path("."));
  std::cout << rows.back().dump() << "\n";
  return 0;
}

// ------------------------------------------------------------------- eval-lp

int cmd_eval_lp(const Common& c, const std::string& mined_path, bool all_modes) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  auto mined = load_mined(mined_path, ws);
  RunManifest run("eval-lp", cfg, c.threads);
  run.input(mined_path);
  std::vector<SimilarityMode> modes{cfg.mode};
  if (all_modes)
    modes = {SimilarityMode::SumConf, SimilarityMode::MetaCount, SimilarityMode::ConfFeat,
             SimilarityMode::BinaryFeat};
  json rows = json::array();
  for (const auto& name : cfg.evaluated_relations()) {
    const RelationId r = ws.relation(name);
    if (!mined.count(r)) throw DataError("no mined meta-paths for relation '" + name + "' in " + mined_path);
    LPDataset d = ws.dataset(name);
    for (SimilarityMode m : modes) {
      LPConfig lc;
      lc.mode = m;
      lc.reg_weight = cfg.reg_weight;
      lc.threads = c.threads;
      LPRun res = run_link_prediction(d, ws.graph, mined.at(r), lc);
      rows.push_back({{"relation", name}, {"mode", std::string(to_string(m))}, {"auc", res.metrics.roc_auc},
                      {"ap", res.metrics.ap}, {"n_test", res.pairs.size()}});
    }
  }
  write_json(c.out, {{"kind", "lp"}, {"rows", rows}});
  run.output(c.out);
  run.write(fs::path(c.out).has_parent_path() ? fs::path(c.out).parent_path() : fs::path("."));
  return 0;
}

// ---------------------------------------------------------- inductive-study

int cmd_inductive_study(const Common& c, const std::string& mined_path, const std::string& relation) {
  ExperimentConfig cfg = build_config(c);
  Workspace ws = load_workspace(c.data);
  auto mined = load_mined(mined_path, ws);
  RunManifest run("inductive-study", cfg, c.threads);
  run.input(mined_path);
  const RelationId r = ws.relation(relation);
  if (!mined.count(r)) throw DataError("no mined meta-paths for relation '" + relation + "' in " + mined_path);
  PreparedRelation prep{ws.dataset(relation), ws.graph};
  std::vector<MetaPath> paths;
  for (const auto& e : mined.at(r).entries) paths.push_back(e.metapath);
  LPConfig lc;
  lc.mode = cfg.mode;
  lc.reg_weight = cfg.reg_weight;
  lc.threads = c.threads;
  const std::vector<double> rates{0.0, 0.2, 0.5, 1.0};
  json rows = json::array();
  for (const RemovalRow& row : node_removal_study(prep, paths, rates, lc, cfg.sample_fraction, cfg.seed))
    rows.push_back({{"relation", relation}, {"rate", row.rate}, {"removed_entities", row.removed},
                    {"auc", row.metrics.roc_auc}, {"ap", row.metrics.ap}});
  write_json(c.out, {{"kind", "removal"}, {"rows", rows}});
  run.output(c.out);
  run.write(fs::path(c.out).has_parent_path() ? fs::path(c.out).parent_path() : fs::path("."));
  return 0;
}

// -------------------------------------------------------------------- report

std::string cell(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v.get<double>();
    return os.str();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render_table(const json& doc, const std::string& title) {
  const json& rows = doc.at("rows");
  std::vector<std::string> cols;
  for (const auto& row : rows)
    for (auto it = row.begin(); it != row.end(); ++it)
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
  // Label columns first, metrics after, in a fixed order.
  static const std::vector<std::string> order{"relation", "mode", "rate", "n", "n_test", "removed_entities",
                                              "hits1", "hits3", "hits10", "mrr", "auc", "ap"};
  std::stable_sort(cols.begin(), cols.end(), [&](const std::string& a, const std::string& b) {
    auto ia = std::find(order.begin(), order.end(), a) - order.begin();
    auto ib = std::find(order.begin(), order.end(), b) - order.begin();
    return ia < ib;
  });
  std::vector<std::vector<std::string>> grid{cols};
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (const auto& col : cols) line.push_back(row.contains(col) ? cell(row.at(col)) : "-");
    grid.push_back(line);
  }
  std::vector<std::size_t> width(cols.size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream os;
  os << title << " (" << doc.value("kind", "?") << ")\n";
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t i = 0; i < grid[r].size(); ++i) {
      const bool left = i == 0 || cols[i] == "mode" || cols[i] == "relation";
      os << (i ? "  " : "") << (left ? std::left : std::right) << std::setw(static_cast<int>(width[i]))
         << grid[r][i];
    }
    os << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      os << std::string(total - 2, '-') << "\n";
    }
  }
  return os.str();
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::string text;
  for (const auto& p : inputs) {
    require(p, "metrics file", "eval-qa, eval-lp or inductive-study");
    json doc;
    try {
      doc = json::parse(read_file(p));
    } catch (const json::exception& e) {
      throw DataError("'" + p + "' is not valid metrics JSON: " + e.what());
    }
    if (!doc.contains("rows")) throw DataError("'" + p + "' has no rows");
    text += (text.empty() ? "" : "\n") + render_table(doc, fs::path(p).filename().string());
  }
  std::cout << text;
  if (!out.empty()) write_file(out, text);
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool data = true, bool out = true) {
  sub->add_option("-c,--config", c.config_path, "key=value configuration file");
  sub->add_option("-s,--set", c.overrides, "override a configuration key (key=value), repeatable");
  sub->add_option("-t,--threads", c.threads, "worker threads (default: number of cores)");
  if (data) sub->add_option("-d,--data", c.data, "prepared dataset directory")->required();
  if (out) sub->add_option("-o,--out", c.out, "output path")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hinwalk: reinforcement-learned meta-path discovery on heterogeneous information networks"};
  app.require_subcommand(1);
  Common c;

  std::string fixture = "toy";
  std::uint64_t gen_seed = 7;
  auto* gen = app.add_subcommand("generate", "write a synthetic fixture graph (triples.tsv, types.tsv)");
  gen->add_option("-f,--fixture", fixture, "toy, citizenship, convergence, schema-complex, transfer or random");
  gen->add_option("--seed", gen_seed, "fixture seed");
  gen->add_option("-o,--out", c.out, "output directory")->required();

  auto* prep = app.add_subcommand("prepare", "split relations 8:2, sample negatives, write a dataset directory");
  add_common(prep, c);

  bool random_emb = false;
  auto* embed = app.add_subcommand("embed", "train translation embeddings and pool them per type");
  add_common(embed, c);
  embed->add_flag("--random", random_emb, "uniform random initialisation instead of translation training");

  std::string emb_path;
  bool resume = false;
  auto* train = app.add_subcommand("train", "train the path-finding policy");
  add_common(train, c);
  train->add_option("-e,--embeddings", emb_path, "embedding file from `embed`")->required();
  train->add_flag("--resume", resume, "continue from the checkpoint in the output directory");

  std::string model_dir;
  auto* infer = app.add_subcommand("infer", "beam-search meta-paths for the test relations");
  add_common(infer, c);
  infer->add_option("-m,--model", model_dir, "model directory from `train`")->required();

  std::string mined_path;
  auto* qa = app.add_subcommand("eval-qa", "Hits@K and MRR of mined meta-paths on test triples");
  add_common(qa, c);
  qa->add_option("-p,--mined", mined_path, "mined meta-path TSV")->required();

  bool all_modes = false;
  auto* lp = app.add_subcommand("eval-lp", "link-prediction ROC-AUC and AP");
  add_common(lp, c);
  lp->add_option("-p,--mined", mined_path, "mined meta-path TSV")->required();
  lp->add_flag("--all-modes", all_modes, "evaluate all four similarity functions");

  std::string method = "random-walk";
  std::size_t attempts = 1000;
  int multiplier = 1;
  auto* base = app.add_subcommand("baseline", "random-walk or enumeration meta-path baselines");
  add_common(base, c);
  base->add_option("--method", method, "random-walk or enumerate");
  base->add_option("--attempts", attempts, "random walks per query");
  base->add_option("--multiplier", multiplier, "budget multiplier (1, 5, 10)");

  std::string relation;
  auto* ind = app.add_subcommand("inductive-study", "entity removal study at rates 0, 0.2, 0.5, 1");
  add_common(ind, c);
  ind->add_option("-p,--mined", mined_path, "mined meta-path TSV")->required();
  ind->add_option("-r,--relation", relation, "relation to study")->required();

  std::vector<std::string> reports;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "render metric JSON files as aligned text tables");
  rep->add_option("inputs", reports, "metric JSON files")->required();
  rep->add_option("-o,--out", report_out, "also write the tables to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_generate(fixture, gen_seed, c.out);
    if (*prep) return cmd_prepare(c);
    if (*embed) return cmd_embed(c, random_emb);
    if (*train) return cmd_train(c, emb_path, resume);
    if (*infer) return cmd_infer(c, model_dir);
    if (*qa) return cmd_eval_qa(c, mined_path);
    if (*lp) return cmd_eval_lp(c, mined_path, all_modes);
    if (*base) return cmd_baseline(c, method, attempts, multiplier);
    if (*ind) return cmd_inductive_study(c, mined_path, relation);
    if (*rep) return cmd_report(reports, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
