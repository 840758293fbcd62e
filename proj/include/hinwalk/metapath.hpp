#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hinwalk/graph.hpp"

namespace hinwalk {

// t_1 -r_1-> t_2 -r_2-> ... -r_{l-1}-> t_l
struct MetaPath {
  std::vector<TypeId> types;
  std::vector<RelationId> relations;

  std::size_t length() const { return types.size(); }
  std::size_t hops() const { return relations.size(); }
  TypeId head_type() const { return types.front(); }
  TypeId tail_type() const { return types.back(); }

  auto operator<=>(const MetaPath&) const = default;
};

// Structural check: sizes agree, at least one hop, every hop is a schema edge.
bool is_well_formed(const MetaPath& m, const SchemaGraph& s);

// Interleaved id sequence t_1, r_1, t_2, ..., t_l.
std::vector<std::int32_t> canonical_encoding(const MetaPath& m);

struct MetaPathHash {
  std::size_t operator()(const MetaPath& m) const noexcept;
};

// `Person -GraduatedFrom-> University -LocatedIn-> Country`
std::string format_metapath(const MetaPath& m, const InstanceGraph& g);
MetaPath parse_metapath(std::string_view text, const InstanceGraph& g);

}  // namespace hinwalk
