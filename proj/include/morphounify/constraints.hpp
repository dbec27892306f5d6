/* conditional constraints: typing antecedents, path-equation/relational consequents */

#ifndef MORPHOUNIFY_CONSTRAINTS_HPP
#define MORPHOUNIFY_CONSTRAINTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "morphounify/types.hpp"

namespace morphounify {

using FeaturePath = std::vector<FeatId>;

// Antecedents contain only typing requirements on paths rooted at the
// constrained node.  ProperSubtype is the subtype_of(T) form: satisfied only
// once the path value is typed strictly below T (for strings, a literal).
enum class ReqMode : uint8_t { Subtype, ProperSubtype };

struct AntecedentReq {
  FeaturePath path;
  TypeId type = kTopType;
  ReqMode mode = ReqMode::Subtype;
};

// A term in a consequent: a path rooted at the constrained node, a shared
// variable, a type constant or a string constant.
struct ConsTerm {
  enum Kind : uint8_t { Path, Var, TypeConst, StrConst } kind = Path;
  FeaturePath path;
  uint32_t var = 0;
  TypeId type = kTopType;
  std::u32string str;

  static ConsTerm make_path(FeaturePath p) {
    ConsTerm t; t.kind = Path; t.path = std::move(p); return t;
  }
  static ConsTerm make_var(uint32_t v) {
    ConsTerm t; t.kind = Var; t.var = v; return t;
  }
  static ConsTerm make_type(TypeId ty) {
    ConsTerm t; t.kind = TypeConst; t.type = ty; return t;
  }
  static ConsTerm make_str(std::u32string s) {
    ConsTerm t; t.kind = StrConst; t.str = std::move(s); return t;
  }
};

struct Equation {
  ConsTerm lhs, rhs;
};

enum class BuiltinRel : uint8_t { FsAppend, Concat, Morphology };

struct RelCall {
  BuiltinRel rel;
  std::vector<ConsTerm> args;
};

struct ConditionalConstraint {
  uint32_t id = 0;
  std::string name;
  TypeId anchor = kTopType;        // root typing requirement
  std::vector<AntecedentReq> reqs; // further requirements
  std::vector<Equation> equations; // enforced before the relational goals
  std::vector<RelCall> relations;
  uint32_t var_count = 0;
};

struct ConstraintSet {
  std::vector<ConditionalConstraint> items;
};

// List machinery required by fs_append, resolved once per grammar.
struct ListTypes {
  TypeId list = 0, elist = 0, nelist = 0;
  FeatId first = 0, rest = 0;
};

// Everything immutable that engines share: the hierarchy, the grammar's
// principled constraints, and resolved builtin helpers.
struct GrammarCore {
  TypeHierarchy hierarchy;
  ConstraintSet constraints;
  std::optional<ListTypes> lists;

  void resolve_lists();
};

} // namespace morphounify

#endif
