#include "hinwalk/metapath.hpp"

#include <sstream>

#include "hinwalk/errors.hpp"

namespace hinwalk {

bool is_well_formed(const MetaPath& m, const SchemaGraph& s) {
  if (m.types.size() < 2 || m.types.size() != m.relations.size() + 1) return false;
  for (std::size_t i = 0; i < m.relations.size(); ++i)
    if (!s.has_edge({m.types[i], m.relations[i], m.types[i + 1]})) return false;
  return true;
}

std::vector<std::int32_t> canonical_encoding(const MetaPath& m) {
  std::vector<std::int32_t> code;
  code.reserve(m.types.size() + m.relations.size());
  for (std::size_t i = 0; i < m.types.size(); ++i) {
    code.push_back(m.types[i]);
    if (i < m.relations.size()) code.push_back(m.relations[i]);
  }
  return code;
}

std::size_t MetaPathHash::operator()(const MetaPath& m) const noexcept {
  // FNV-1a over the canonical encoding.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::int32_t v) {
    auto u = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (std::size_t i = 0; i < m.types.size(); ++i) {
    mix(m.types[i]);
    if (i < m.relations.size()) mix(m.relations[i]);
  }
  return static_cast<std::size_t>(h);
}

std::string format_metapath(const MetaPath& m, const InstanceGraph& g) {
  std::string out;
  for (std::size_t i = 0; i < m.types.size(); ++i) {
    if (i > 0) out += " -" + g.relation_vocab().name(m.relations[i - 1]) + "-> ";
    out += g.type_vocab().name(m.types[i]);
  }
  return out;
}

MetaPath parse_metapath(std::string_view text, const InstanceGraph& g) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  auto fail = [&](const std::string& why) {
    return DataError("bad meta-path '" + std::string(text) + "': " + why);
  };
  if (tokens.size() < 3 || tokens.size() % 2 == 0) throw fail("expected type (-rel-> type)+");
  MetaPath m;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i % 2 == 0) {
      auto t = g.type_vocab().find(tokens[i]);
      if (!t) throw fail("unknown type '" + tokens[i] + "'");
      m.types.push_back(*t);
    } else {
      const std::string& arrow = tokens[i];
      if (arrow.size() < 4 || arrow.front() != '-' || arrow.compare(arrow.size() - 2, 2, "->") != 0)
        throw fail("malformed arrow '" + arrow + "'");
      auto name = arrow.substr(1, arrow.size() - 3);
      auto r = g.relation_vocab().find(name);
      if (!r) throw fail("unknown relation '" + name + "'");
      m.relations.push_back(*r);
    }
  }
  return m;
}

}  // namespace hinwalk
