/* shared fixtures for the unit suites */

#ifndef MORPHOUNIFY_TEST_HELPERS_HPP
#define MORPHOUNIFY_TEST_HELPERS_HPP

#include <doctest.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morphounify/fs.hpp"

namespace testutil {

using namespace morphounify;

// Small core: string, lists, an agreement hierarchy and a sign type.
inline std::shared_ptr<GrammarCore> small_core() {
  auto core = std::make_shared<GrammarCore>();
  auto& h = core->hierarchy;
  h.declare("string", {"top"}, {});
  h.declare("list", {"top"}, {});
  h.declare("nelist", {"list"}, {{"first", "top"}, {"rest", "list"}});
  h.declare("elist", {"list"}, {});
  h.declare("agr", {"top"}, {});
  h.declare("sg", {"agr"}, {});
  h.declare("pl", {"agr"}, {});
  h.declare("sign", {"top"}, {{"phon", "string"}, {"num", "agr"}});
  h.declare("duo", {"top"}, {{"l", "agr"}, {"r", "agr"}});
  core->resolve_lists();
  return core;
}

inline NodeId make_list(Engine& e, const std::vector<std::u32string>& items) {
  const ListTypes& lt = *e.core().lists;
  NodeId head = e.new_node(lt.elist);
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    NodeId cell = e.new_node(lt.nelist);
    REQUIRE(e.path_put(cell, {lt.first}, e.new_string(*it)));
    REQUIRE(e.path_put(cell, {lt.rest}, head));
    head = cell;
  }
  return head;
}

// Reads back a fully ground list of string literals; nullopt when the spine
// or an element is not ground.
inline std::optional<std::vector<std::u32string>> read_list(Engine& e, NodeId n) {
  const ListTypes& lt = *e.core().lists;
  std::vector<std::u32string> out;
  while (true) {
    n = e.deref(n);
    if (e.type_of(n) == lt.elist)
      return out;
    if (e.type_of(n) != lt.nelist)
      return std::nullopt;
    auto f = e.peek_path(n, {lt.first});
    if (!f)
      return std::nullopt;
    auto s = e.string_value(*f);
    if (!s)
      return std::nullopt;
    out.push_back(*s);
    auto r = e.peek_path(n, {lt.rest});
    if (!r)
      return std::nullopt;
    n = *r;
  }
}

// Store-wide well-typing sweep: every live instantiated node carries exactly
// the features appropriate for its type, each value within its restriction.
inline void check_well_typed(Engine& e) {
  const auto& h = e.hierarchy();
  for (NodeId n = 0; n < e.node_count(); ++n) {
    if (e.deref(n) != n)
      continue;
    const auto& feats = e.features(n);
    if (!e.instantiated(n)) {
      CHECK(feats.empty());
      continue;
    }
    const auto& app = h.appropriate(e.type_of(n));
    REQUIRE(feats.size() == app.size());
    for (const auto& [f, restr] : app) {
      bool found = false;
      for (const auto& [ff, v] : feats) {
        if (ff != f)
          continue;
        found = true;
        CHECK(h.subtype(e.type_of(v), restr));
      }
      CHECK(found);
    }
  }
}

} // namespace testutil

#endif
