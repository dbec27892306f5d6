/* type hierarchy with appropriateness conditions, GLB and well-typedness queries */

#ifndef MORPHOUNIFY_TYPES_HPP
#define MORPHOUNIFY_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "morphounify/chars.hpp"

namespace morphounify {

using TypeId = uint32_t;
using FeatId = uint32_t;

constexpr TypeId kTopType = 0;
// Ids at or above this denote interned string literals, which live in an
// engine-side table and behave as atomic subtypes of the declared string type.
constexpr TypeId kLiteralBase = 0x80000000u;

inline bool is_literal_type(TypeId t) { return t >= kLiteralBase; }

struct GlbResult {
  enum State { Ok, None, Ambiguous };
  State state = None;
  TypeId type = 0;

  bool ok() const { return state == Ok; }
};

// Feature/value-restriction pairs in declaration order (inherited first).
using FeatList = std::vector<std::pair<FeatId, TypeId>>;

class TypeHierarchy {
public:
  TypeHierarchy();

  // Parents must already be declared; appropriateness is merged with the
  // inherited features, and a restriction without a common subtype with the
  // inherited one is rejected.  Throws LoadError on unknown parent, cycle,
  // redeclaration or appropriateness conflict.
  TypeId declare(const std::string &name, const std::vector<std::string> &parents,
                 const std::vector<std::pair<std::string, std::string>> &features);

  std::optional<TypeId> find_type(const std::string &name) const;
  TypeId require_type(const std::string &name) const;
  const std::string &type_name(TypeId t) const;
  size_t type_count() const { return _types.size(); }

  FeatId intern_feature(const std::string &name);
  std::optional<FeatId> find_feature(const std::string &name) const;
  const std::string &feature_name(FeatId f) const { return _featnames[f]; }
  size_t feature_count() const { return _featnames.size(); }

  // a is-a b.  Literal ids compare below the string type.
  bool subtype(TypeId a, TypeId b) const;
  GlbResult glb(TypeId a, TypeId b) const;

  const FeatList &appropriate(TypeId t) const;
  std::optional<TypeId> restriction(TypeId t, FeatId f) const;

  // True when some type at or below t bears f.
  bool feature_possible(TypeId t, FeatId f) const;
  // Most general type at or below t bearing f; None when impossible,
  // Ambiguous when several incomparable candidates exist.
  GlbResult coerce_for_feature(TypeId t, FeatId f) const;

  // The declared type named "string"; throws if the grammar never declared it.
  TypeId string_type() const;
  bool has_string_type() const { return _string_type.has_value(); }

private:
  struct Bits {
    std::vector<uint64_t> w;
    void set(uint32_t i);
    bool test(uint32_t i) const;
    std::vector<uint32_t> members() const;
    static std::vector<uint32_t> intersect(const Bits &a, const Bits &b);
  };

  struct TypeInfo {
    std::string name;
    std::vector<TypeId> parents;
    Bits ancestors;   // includes self
    Bits descendants; // includes self
    FeatList feats;
  };

  GlbResult glb_declared(TypeId a, TypeId b) const;

  std::vector<TypeInfo> _types;
  std::unordered_map<std::string, TypeId> _byname;
  std::vector<std::string> _featnames;
  std::unordered_map<std::string, FeatId> _featbyname;
  std::vector<Bits> _feat_bearers; // per feature: types where appropriate
  mutable std::unordered_map<uint64_t, GlbResult> _glb_cache;
  mutable std::optional<TypeId> _string_type;
};

} // namespace morphounify

#endif
