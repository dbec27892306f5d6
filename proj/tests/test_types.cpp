#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "morphounify/errors.hpp"
#include "morphounify/types.hpp"

using namespace morphounify;

TEST_CASE("top is predeclared and subsumes everything") {
  TypeHierarchy h;
  CHECK(h.find_type("top") == kTopType);
  TypeId a = h.declare("a", {"top"}, {});
  CHECK(h.subtype(a, kTopType));
  CHECK_FALSE(h.subtype(kTopType, a));
  CHECK(h.subtype(a, a));
  CHECK(h.glb(a, kTopType).type == a);
}

TEST_CASE("declare rejects malformed hierarchies") {
  TypeHierarchy h;
  CHECK_THROWS_AS(h.declare("a", {"nope"}, {}), LoadError);
  CHECK_THROWS_AS(h.declare("b", {"b"}, {}), LoadError);
  CHECK_THROWS_AS(h.declare("r", {}, {}), LoadError);
  h.declare("a", {"top"}, {});
  CHECK_THROWS_AS(h.declare("a", {"top"}, {}), LoadError);
  CHECK_THROWS_AS(h.declare("f", {"top"}, {{"x", "missing"}}), LoadError);
}

TEST_CASE("glb on a diamond resolves to the unique lower bound") {
  TypeHierarchy h;
  TypeId a = h.declare("a", {"top"}, {});
  TypeId b = h.declare("b", {"top"}, {});
  TypeId c = h.declare("c", {"a", "b"}, {});
  GlbResult g = h.glb(a, b);
  REQUIRE(g.ok());
  CHECK(g.type == c);
  CHECK(h.glb(b, a).type == c);
  CHECK(h.subtype(c, a));
  CHECK(h.subtype(c, b));
}

TEST_CASE("glb reports incomparable maximal lower bounds as ambiguous") {
  TypeHierarchy h;
  h.declare("a", {"top"}, {});
  h.declare("b", {"top"}, {});
  h.declare("c", {"a", "b"}, {});
  h.declare("d", {"a", "b"}, {});
  TypeId a = h.require_type("a"), b = h.require_type("b");
  CHECK(h.glb(a, b).state == GlbResult::Ambiguous);
}

TEST_CASE("glb is none for disjoint types") {
  TypeHierarchy h;
  TypeId a = h.declare("a", {"top"}, {});
  TypeId b = h.declare("b", {"top"}, {});
  CHECK(h.glb(a, b).state == GlbResult::None);
}

namespace {

// Independent oracle: reachability by recursion, meets filtered for
// maximality by pairwise comparison.
struct naive_hierarchy {
  std::vector<std::vector<int>> parents;

  bool is_sub(int a, int b) const {
    if (a == b)
      return true;
    for (int p : parents[a])
      if (is_sub(p, b))
        return true;
    return false;
  }

  GlbResult glb(int a, int b) const {
    std::vector<int> meets;
    for (int t = 0; t < static_cast<int>(parents.size()); ++t)
      if (is_sub(t, a) && is_sub(t, b))
        meets.push_back(t);
    std::vector<int> maximal;
    for (int t : meets) {
      bool top_of_meets = true;
      for (int u : meets)
        if (u != t && is_sub(t, u))
          top_of_meets = false;
      if (top_of_meets)
        maximal.push_back(t);
    }
    if (maximal.empty())
      return {GlbResult::None, 0};
    if (maximal.size() > 1)
      return {GlbResult::Ambiguous, 0};
    return {GlbResult::Ok, static_cast<TypeId>(maximal[0])};
  }
};

} // namespace

TEST_CASE("glb and subtype match exhaustive search on random hierarchies") {
  std::mt19937 rng(918273645u);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 3 + static_cast<int>(rng() % 10);
    naive_hierarchy naive;
    naive.parents.push_back({}); // top
    TypeHierarchy h;
    std::vector<TypeId> ids{kTopType};
    for (int i = 1; i <= n; ++i) {
      int nparents = 1 + static_cast<int>(rng() % 2);
      std::vector<int> ps;
      for (int k = 0; k < nparents; ++k) {
        int p = static_cast<int>(rng() % i);
        if (std::find(ps.begin(), ps.end(), p) == ps.end())
          ps.push_back(p);
      }
      std::vector<std::string> pnames;
      for (int p : ps)
        pnames.push_back(p == 0 ? "top" : "t" + std::to_string(p));
      TypeId id = h.declare("t" + std::to_string(i), pnames, {});
      REQUIRE(id == static_cast<TypeId>(i));
      ids.push_back(id);
      naive.parents.push_back(ps);
    }
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        CHECK(h.subtype(ids[a], ids[b]) == naive.is_sub(a, b));
        GlbResult want = naive.glb(a, b);
        GlbResult got = h.glb(ids[a], ids[b]);
        CHECK(got.state == want.state);
        if (want.ok())
          CHECK(got.type == want.type);
      }
    }
  }
}

TEST_CASE("appropriateness is inherited and merged by restriction meet") {
  TypeHierarchy h;
  h.declare("val", {"top"}, {});
  h.declare("narrow", {"val"}, {});
  TypeId a = h.declare("a", {"top"}, {{"f", "val"}});
  TypeId b = h.declare("b", {"a"}, {});
  TypeId c = h.declare("c", {"a"}, {{"f", "narrow"}});
  FeatId f = *h.find_feature("f");
  CHECK(h.restriction(a, f) == h.find_type("val"));
  CHECK(h.restriction(b, f) == h.find_type("val"));
  CHECK(h.restriction(c, f) == h.find_type("narrow"));

  // Two parents whose restrictions meet in a unique type merge fine.
  h.declare("x", {"top"}, {});
  h.declare("y", {"top"}, {});
  h.declare("xy", {"x", "y"}, {});
  h.declare("p", {"top"}, {{"g", "x"}});
  h.declare("q", {"top"}, {{"g", "y"}});
  TypeId pq = h.declare("pq", {"p", "q"}, {});
  CHECK(h.restriction(pq, *h.find_feature("g")) == h.find_type("xy"));

  // Disjoint restrictions for the same feature are a load error.
  h.declare("u", {"top"}, {});
  h.declare("v", {"top"}, {});
  h.declare("p2", {"top"}, {{"h", "u"}});
  h.declare("q2", {"top"}, {{"h", "v"}});
  CHECK_THROWS_AS(h.declare("pq2", {"p2", "q2"}, {}), LoadError);
}

TEST_CASE("feature introduction is located at the unique bearer") {
  TypeHierarchy h;
  h.declare("val", {"top"}, {});
  TypeId a = h.declare("a", {"top"}, {});
  TypeId b = h.declare("b", {"a"}, {{"f", "val"}});
  h.declare("b2", {"b"}, {});
  FeatId f = *h.find_feature("f");

  CHECK(h.feature_possible(a, f));
  CHECK_FALSE(h.feature_possible(h.require_type("val"), f));
  GlbResult c = h.coerce_for_feature(a, f);
  REQUIRE(c.ok());
  CHECK(c.type == b);
  // Already appropriate: coercion is the identity.
  CHECK(h.coerce_for_feature(b, f).type == b);

  // Two incomparable bearers below make the coercion ambiguous.
  TypeId z = h.declare("z", {"top"}, {});
  h.declare("z1", {"z"}, {{"g", "val"}});
  h.declare("z2", {"z"}, {{"g", "val"}});
  FeatId g = *h.find_feature("g");
  CHECK(h.coerce_for_feature(z, g).state == GlbResult::Ambiguous);
  CHECK(h.coerce_for_feature(h.require_type("val"), g).state == GlbResult::None);
}

TEST_CASE("literal type ids act as atomic subtypes of string") {
  TypeHierarchy h;
  TypeId str = h.declare("string", {"top"}, {});
  TypeId other = h.declare("other", {"top"}, {});
  TypeId lit1 = kLiteralBase + 0;
  TypeId lit2 = kLiteralBase + 1;
  CHECK(is_literal_type(lit1));
  CHECK(h.subtype(lit1, str));
  CHECK(h.subtype(lit1, kTopType));
  CHECK_FALSE(h.subtype(str, lit1));
  CHECK_FALSE(h.subtype(lit1, other));
  CHECK(h.glb(lit1, lit1).type == lit1);
  CHECK(h.glb(lit1, lit2).state == GlbResult::None);
  CHECK(h.glb(lit1, str).type == lit1);
  CHECK(h.glb(str, lit2).type == lit2);
  CHECK(h.glb(lit1, kTopType).type == lit1);
  CHECK(h.glb(lit1, other).state == GlbResult::None);
}
