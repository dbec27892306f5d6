/* attribute-value matrix rendering and JSON (de)serialization */

#include "morphounify/avm.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "morphounify/chars.hpp"

namespace morphounify {

namespace {

// Arrival counts per dereferenced node; >= 2 means the node is shared and
// gets a coreference tag.
void count_arrivals(const Engine& e, NodeId n, std::unordered_map<NodeId, int>& seen) {
  n = e.deref(n);
  if (++seen[n] > 1) return;
  for (const auto& [f, v] : e.features(n)) {
    (void)f;
    count_arrivals(e, v, seen);
  }
}

// Features in canonical (appropriateness) order.  Under the store invariant
// an instantiated node carries exactly its appropriate features, so this is
// a stable reordering of Engine::features().
std::vector<std::pair<FeatId, NodeId>> ordered_feats(const Engine& e, NodeId n) {
  std::vector<std::pair<FeatId, NodeId>> out;
  const auto& have = e.features(n);
  for (const auto& [f, restr] : e.hierarchy().appropriate(e.type_of(n))) {
    (void)restr;
    for (const auto& [g, v] : have)
      if (g == f) {
        out.emplace_back(f, e.deref(v));
        break;
      }
  }
  return out;
}

struct Printer {
  const Engine& e;
  std::unordered_map<NodeId, int> arrivals;
  std::unordered_map<NodeId, int> tags;
  int next_tag = 1;

  std::string render(NodeId n, size_t col) {
    n = e.deref(n);
    std::string out;
    if (arrivals[n] > 1) {
      auto it = tags.find(n);
      if (it != tags.end()) return "<" + std::to_string(it->second) + ">";
      tags[n] = next_tag;
      out = "<" + std::to_string(next_tag) + "> ";
      ++next_tag;
      col += out.size();
    }
    if (e.is_string(n) && e.ground_string(n)) {
      out += "\"" + u32_to_utf8(*e.string_value(n)) + "\"";
      return out;
    }
    const std::string& tn = e.hierarchy().type_name(e.type_of(n));
    auto feats = ordered_feats(e, n);
    if (feats.empty()) {
      out += tn;
      return out;
    }
    out += tn + "\n" + std::string(col, ' ') + "[ ";
    bool first = true;
    for (const auto& [f, v] : feats) {
      const std::string& fn = e.hierarchy().feature_name(f);
      if (!first) out += "\n" + std::string(col + 2, ' ');
      first = false;
      out += fn + " " + render(v, col + 2 + fn.size() + 1);
    }
    out += " ]";
    return out;
  }
};

struct JsonDumper {
  const Engine& e;
  std::unordered_map<NodeId, int> arrivals;
  std::unordered_map<NodeId, int> ids;
  int next_id = 1;

  nlohmann::json dump(NodeId n) {
    n = e.deref(n);
    nlohmann::json j;
    if (arrivals[n] > 1) {
      auto it = ids.find(n);
      if (it != ids.end()) return nlohmann::json{{"ref", it->second}};
      ids[n] = next_id;
      j["id"] = next_id;
      ++next_id;
    }
    if (e.is_string(n) && e.ground_string(n)) {
      j["str"] = u32_to_utf8(*e.string_value(n));
      return j;
    }
    j["type"] = e.hierarchy().type_name(e.type_of(n));
    auto feats = ordered_feats(e, n);
    if (!feats.empty()) {
      // json objects iterate by key; dump in that order so shared-node
      // definitions always precede their back references on rebuild
      std::sort(feats.begin(), feats.end(), [&](const auto& a, const auto& b) {
        return e.hierarchy().feature_name(a.first) < e.hierarchy().feature_name(b.first);
      });
      nlohmann::json fj = nlohmann::json::object();
      for (const auto& [f, v] : feats) fj[e.hierarchy().feature_name(f)] = dump(v);
      j["feats"] = std::move(fj);
    }
    return j;
  }
};

NodeId rebuild(Engine& e, const nlohmann::json& j, std::map<int, NodeId>& byid) {
  if (j.contains("ref")) {
    auto it = byid.find(j["ref"].get<int>());
    if (it == byid.end()) throw LoadError("json rebuild: dangling ref");
    return it->second;
  }
  NodeId n;
  if (j.contains("str")) {
    n = e.new_string(utf8_to_u32(j["str"].get<std::string>()));
  } else {
    auto t = e.hierarchy().find_type(j["type"].get<std::string>());
    if (!t) throw LoadError("json rebuild: unknown type '" + j["type"].get<std::string>() + "'");
    n = e.new_node(*t);
  }
  if (j.contains("id")) byid[j["id"].get<int>()] = n;
  if (j.contains("feats")) {
    for (auto it = j["feats"].begin(); it != j["feats"].end(); ++it) {
      auto f = e.hierarchy().find_feature(it.key());
      if (!f) throw LoadError("json rebuild: unknown feature '" + it.key() + "'");
      NodeId child = rebuild(e, it.value(), byid);
      if (!e.path_put(n, {*f}, child))
        throw LoadError("json rebuild: ill-typed structure at feature '" + it.key() + "'");
    }
  }
  return n;
}

} // namespace

std::string avm_to_string(const Engine& e, NodeId root) {
  Printer p{e, {}, {}, 1};
  count_arrivals(e, root, p.arrivals);
  return p.render(root, 0);
}

nlohmann::json fs_to_json(const Engine& e, NodeId root) {
  JsonDumper d{e, {}, {}, 1};
  count_arrivals(e, root, d.arrivals);
  return d.dump(root);
}

NodeId json_to_fs(Engine& e, const nlohmann::json& j) {
  std::map<int, NodeId> byid;
  return rebuild(e, j, byid);
}

} // namespace morphounify
