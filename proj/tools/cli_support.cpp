#include "cli_support.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hinwalk/errors.hpp"

namespace hinwalk::cli {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("bad value '" + v + "' for key '" + key + "'");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ",") + x;
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return out;
}

}  // namespace

std::string to_string(Setting s) {
  switch (s) {
    case Setting::PerRelationTransductive: return "per-relation-transductive";
    case Setting::MultiRelationTransductive: return "multi-relation-transductive";
    case Setting::MultiRelationInductive: return "multi-relation-inductive";
  }
  return "?";
}

Setting parse_setting(const std::string& s) {
  for (auto v : {Setting::PerRelationTransductive, Setting::MultiRelationTransductive,
                 Setting::MultiRelationInductive})
    if (s == to_string(v)) return v;
  throw ConfigError("unknown setting '" + s +
                    "' (expected per-relation-transductive, multi-relation-transductive or "
                    "multi-relation-inductive)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
  static const std::map<std::string, Setter> table{
      {"i_base", [](auto& c, auto& v) { c.train.i_base = parse_number<int>("i_base", v); }},
      {"i_r", [](auto& c, auto& v) { c.train.i_r = parse_number<int>("i_r", v); }},
      {"k", [](auto& c, auto& v) { c.train.k = parse_number<int>("k", v); }},
      {"n", [](auto& c, auto& v) { c.train.n = parse_number<int>("n", v); }},
      {"d_e", [](auto& c, auto& v) { c.dims.embed_dim = parse_number<int>("d_e", v); }},
      {"d_h", [](auto& c, auto& v) { c.dims.hidden_dim = parse_number<int>("d_h", v); }},
      {"alpha", [](auto& c, auto& v) { c.train.alpha = parse_number<double>("alpha", v); }},
      {"beta", [](auto& c, auto& v) { c.train.beta0 = parse_number<double>("beta", v); }},
      {"lambda1", [](auto& c, auto& v) { c.train.lambda1 = parse_number<double>("lambda1", v); }},
      {"lambda2", [](auto& c, auto& v) { c.train.lambda2 = parse_number<double>("lambda2", v); }},
      {"beam_width", [](auto& c, auto& v) { c.beam_width = parse_number<std::size_t>("beam_width", v); }},
      {"max_hops", [](auto& c, auto& v) { c.train.max_hops = parse_number<int>("max_hops", v); }},
      {"narrow_threshold",
       [](auto& c, auto& v) { c.train.narrow_threshold = parse_number<double>("narrow_threshold", v); }},
      {"setting", [](auto& c, auto& v) { c.setting = parse_setting(v); }},
      {"train_relations", [](auto& c, auto& v) { c.train_relations = split_list(v); }},
      {"test_relations", [](auto& c, auto& v) { c.test_relations = split_list(v); }},
      {"mode", [](auto& c, auto& v) { c.mode = parse_similarity_mode(v); }},
      {"reg_weight", [](auto& c, auto& v) { c.reg_weight = parse_number<double>("reg_weight", v); }},
      {"max_len", [](auto& c, auto& v) { c.max_len = parse_number<int>("max_len", v); }},
      {"test_ratio", [](auto& c, auto& v) { c.test_ratio = parse_number<double>("test_ratio", v); }},
      {"embed_epochs", [](auto& c, auto& v) { c.embed_epochs = parse_number<int>("embed_epochs", v); }},
      {"sample_fraction",
       [](auto& c, auto& v) { c.sample_fraction = parse_number<double>("sample_fraction", v); }},
      {"seed", [](auto& c, auto& v) { c.seed = parse_number<std::uint64_t>("seed", v); }},
  };
  auto it = table.find(trim(key));
  if (it == table.end()) throw ConfigError("unknown configuration key '" + trim(key) + "'");
  it->second(*this, v);
  train.seed = seed;
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void ExperimentConfig::validate() const {
  train.validate();
  if (dims.embed_dim <= 0 || dims.hidden_dim <= 0) throw ConfigError("d_e and d_h must be positive");
  if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
  if (max_len < 2) throw ConfigError("max_len must be >= 2");
  if (!(test_ratio > 0.0 && test_ratio < 1.0)) throw ConfigError("test_ratio must be in (0, 1)");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw ConfigError("sample_fraction must be in (0, 1]");
  std::set<std::string> tr(train_relations.begin(), train_relations.end());
  if (setting == Setting::MultiRelationInductive) {
    for (const auto& r : test_relations)
      if (tr.count(r))
        throw ConfigError("multi-relation-inductive needs disjoint train and test relations; '" + r +
                          "' is in both");
  } else {
    for (const auto& r : test_relations)
      if (!tr.count(r))
        throw ConfigError(to_string(setting) + " needs test relations within the train relations; '" + r +
                          "' is not a train relation");
  }
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  return {
      {"i_base", std::to_string(train.i_base)},
      {"i_r", std::to_string(train.i_r)},
      {"k", std::to_string(train.k)},
      {"n", std::to_string(train.n)},
      {"d_e", std::to_string(dims.embed_dim)},
      {"d_h", std::to_string(dims.hidden_dim)},
      {"alpha", fmt_double(train.alpha)},
      {"beta", fmt_double(train.beta0)},
      {"lambda1", fmt_double(train.lambda1)},
      {"lambda2", fmt_double(train.lambda2)},
      {"beam_width", std::to_string(beam_width)},
      {"max_hops", std::to_string(train.max_hops)},
      {"narrow_threshold", fmt_double(train.narrow_threshold)},
      {"setting", to_string(setting)},
      {"train_relations", join(train_relations)},
      {"test_relations", join(test_relations)},
      {"mode", std::string(to_string(mode))},
      {"reg_weight", fmt_double(reg_weight)},
      {"max_len", std::to_string(max_len)},
      {"test_ratio", fmt_double(test_ratio)},
      {"embed_epochs", std::to_string(embed_epochs)},
      {"sample_fraction", fmt_double(sample_fraction)},
      {"seed", std::to_string(seed)},
  };
}

std::vector<std::string> ExperimentConfig::evaluated_relations() const {
  return test_relations.empty() ? train_relations : test_relations;
}

std::string blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << content;
}

std::string file_hash(const fs::path& p) { return blob_hash(read_file(p)); }

std::string directory_digest(const fs::path& dir) {
  std::vector<std::string> lines;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.rfind("run-", 0) == 0) continue;
    lines.push_back(fs::relative(e.path(), dir).generic_string() + " " + file_hash(e.path()));
  }
  std::sort(lines.begin(), lines.end());
  std::string all;
  for (const auto& l : lines) all += l + "\n";
  return blob_hash(all);
}

void require(const fs::path& p, const std::string& what, const std::string& producer) {
  if (!fs::exists(p))
    throw DataError("missing " + what + ": '" + p.string() + "' not found (produce it with `hinwalk " +
                    producer + "`)");
}

RunManifest::RunManifest(std::string command, const ExperimentConfig& cfg, int threads)
    : command_(std::move(command)),
      config_(cfg.echo()),
      seed_(cfg.seed),
      threads_(threads),
      start_(std::chrono::steady_clock::now()) {}

void RunManifest::input(const fs::path& p) { inputs_[p.string()] = file_hash(p); }
void RunManifest::output(const fs::path& p) { outputs_[p.string()] = file_hash(p); }

void RunManifest::write(const fs::path& dir) const {
  json j;
  j["command"] = command_;
  j["config"] = config_;
  j["seed"] = seed_;
  j["threads"] = threads_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  for (auto& [k, v] : extra_.items()) j[k] = v;
  write_file(dir / ("run-" + command_ + ".json"), j.dump(2) + "\n");
}

fs::path pairs_path(const fs::path& dir, const std::string& relation, const std::string& split) {
  return dir / "pairs" / (safe_name(relation) + "." + split + ".tsv");
}

Workspace load_workspace(const fs::path& dir) {
  require(dir / "train.tsv", "training triples", "prepare");
  require(dir / "types.tsv", "entity types", "prepare");
  InstanceGraph base = load_instance_graph_files((dir / "train.tsv").string(), (dir / "types.tsv").string());
  auto [g, s] = add_inverse_relations(base, derive_schema_graph(base));
  return {std::move(g), std::move(s), dir};
}

RelationId Workspace::relation(const std::string& name) const {
  auto r = graph.relation_vocab().find(name);
  if (!r) throw DataError("relation '" + name + "' does not occur in " + (dir / "train.tsv").string());
  return *r;
}

std::vector<Triple> Workspace::test_triples() const {
  const fs::path p = dir / "test.tsv";
  require(p, "test triples", "prepare");
  std::ifstream in(p);
  std::vector<Triple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string h, r, t;
    if (!std::getline(ss, h, '\t') || !std::getline(ss, r, '\t') || !std::getline(ss, t))
      throw ParseError(p.string(), lineno, "expected head<TAB>relation<TAB>tail");
    if (!t.empty() && t.back() == '\r') t.pop_back();
    auto hi = graph.entity_vocab().find(h);
    auto ti = graph.entity_vocab().find(t);
    if (!hi || !ti) throw ParseError(p.string(), lineno, "entity not present in types.tsv");
    out.push_back({*hi, relation(r), *ti});
  }
  return out;
}

LPDataset Workspace::dataset(const std::string& rel) const {
  LPDataset d;
  d.relation = relation(rel);
  auto load = [&](const std::string& split) {
    const fs::path p = pairs_path(dir, rel, split);
    require(p, "link-prediction pairs for '" + rel + "'", "prepare");
    std::ifstream in(p);
    return read_pairs(in, graph, p.string());
  };
  d.train_pos = load("train_pos");
  d.test_pos = load("test_pos");
  d.train_neg = load("train_neg");
  d.test_neg = load("test_neg");
  return d;
}

}  // namespace hinwalk::cli
