#include "morphounify/types.hpp"

#include <algorithm>

#include "morphounify/errors.hpp"

namespace morphounify {

void TypeHierarchy::Bits::set(uint32_t i) {
  size_t word = i >> 6;
  if (word >= w.size())
    w.resize(word + 1, 0);
  w[word] |= uint64_t(1) << (i & 63);
}

bool TypeHierarchy::Bits::test(uint32_t i) const {
  size_t word = i >> 6;
  return word < w.size() && (w[word] >> (i & 63)) & 1;
}

std::vector<uint32_t> TypeHierarchy::Bits::members() const {
  std::vector<uint32_t> out;
  for (size_t word = 0; word < w.size(); ++word) {
    uint64_t bits = w[word];
    while (bits) {
      unsigned bit = __builtin_ctzll(bits);
      out.push_back(static_cast<uint32_t>(word * 64 + bit));
      bits &= bits - 1;
    }
  }
  return out;
}

std::vector<uint32_t> TypeHierarchy::Bits::intersect(const Bits &a, const Bits &b) {
  std::vector<uint32_t> out;
  size_t n = std::min(a.w.size(), b.w.size());
  for (size_t word = 0; word < n; ++word) {
    uint64_t bits = a.w[word] & b.w[word];
    while (bits) {
      unsigned bit = __builtin_ctzll(bits);
      out.push_back(static_cast<uint32_t>(word * 64 + bit));
      bits &= bits - 1;
    }
  }
  return out;
}

TypeHierarchy::TypeHierarchy() {
  TypeInfo top;
  top.name = "top";
  top.ancestors.set(kTopType);
  top.descendants.set(kTopType);
  _types.push_back(std::move(top));
  _byname.emplace("top", kTopType);
}

TypeId TypeHierarchy::declare(const std::string &name,
                              const std::vector<std::string> &parents,
                              const std::vector<std::pair<std::string, std::string>> &features) {
  if (_byname.count(name))
    throw LoadError("type '" + name + "' redeclared");
  std::vector<TypeId> parent_ids;
  for (const auto &p : parents) {
    if (p == name)
      throw LoadError("type '" + name + "' introduces a cycle");
    auto it = _byname.find(p);
    if (it == _byname.end())
      throw LoadError("unknown parent type '" + p + "' for '" + name + "'");
    parent_ids.push_back(it->second);
  }
  if (parent_ids.empty() && name != "top")
    throw LoadError("type '" + name + "' has no parent; only 'top' may be a root");

  TypeId id = static_cast<TypeId>(_types.size());
  if (id >= kLiteralBase)
    throw EngineError("type table overflow");

  TypeInfo info;
  info.name = name;
  info.parents = parent_ids;
  info.ancestors.set(id);
  for (TypeId p : parent_ids)
    for (uint32_t a : _types[p].ancestors.members())
      info.ancestors.set(a);

  // Inherited appropriateness, first-parent order, merged by GLB of the
  // restrictions; the type's own declarations are merged last.
  for (TypeId p : parent_ids) {
    for (const auto &[f, restr] : _types[p].feats) {
      auto pos = std::find_if(info.feats.begin(), info.feats.end(),
                              [f = f](const auto &e) { return e.first == f; });
      if (pos == info.feats.end()) {
        info.feats.emplace_back(f, restr);
      } else {
        GlbResult g = glb(pos->second, restr);
        if (!g.ok())
          throw LoadError("appropriateness conflict on feature '" + _featnames[f] +
                          "' inherited by '" + name + "'");
        pos->second = g.type;
      }
    }
  }
  for (const auto &[fname, rname] : features) {
    FeatId f = intern_feature(fname);
    auto rit = _byname.find(rname);
    if (rit == _byname.end())
      throw LoadError("unknown value type '" + rname + "' for feature '" + fname +
                      "' of '" + name + "'");
    auto pos = std::find_if(info.feats.begin(), info.feats.end(),
                            [f](const auto &e) { return e.first == f; });
    if (pos == info.feats.end()) {
      info.feats.emplace_back(f, rit->second);
    } else {
      GlbResult g = glb(pos->second, rit->second);
      if (!g.ok())
        throw LoadError("appropriateness conflict on feature '" + fname + "' of '" +
                        name + "'");
      pos->second = g.type;
    }
  }

  _types.push_back(std::move(info));
  _byname.emplace(name, id);
  for (uint32_t a : _types[id].ancestors.members())
    _types[a].descendants.set(id);
  for (const auto &[f, restr] : _types[id].feats) {
    (void)restr;
    if (f >= _feat_bearers.size())
      _feat_bearers.resize(f + 1);
    _feat_bearers[f].set(id);
  }
  _glb_cache.clear();
  return id;
}

std::optional<TypeId> TypeHierarchy::find_type(const std::string &name) const {
  auto it = _byname.find(name);
  if (it == _byname.end())
    return std::nullopt;
  return it->second;
}

TypeId TypeHierarchy::require_type(const std::string &name) const {
  auto t = find_type(name);
  if (!t)
    throw LoadError("unknown type '" + name + "'");
  return *t;
}

const std::string &TypeHierarchy::type_name(TypeId t) const {
  if (is_literal_type(t)) {
    static const std::string lit = "<string literal>";
    return lit;
  }
  return _types.at(t).name;
}

FeatId TypeHierarchy::intern_feature(const std::string &name) {
  auto it = _featbyname.find(name);
  if (it != _featbyname.end())
    return it->second;
  FeatId id = static_cast<FeatId>(_featnames.size());
  _featnames.push_back(name);
  _featbyname.emplace(name, id);
  return id;
}

std::optional<FeatId> TypeHierarchy::find_feature(const std::string &name) const {
  auto it = _featbyname.find(name);
  if (it == _featbyname.end())
    return std::nullopt;
  return it->second;
}

bool TypeHierarchy::subtype(TypeId a, TypeId b) const {
  if (a == b)
    return true;
  if (is_literal_type(a))
    return b == string_type() || _types[string_type()].ancestors.test(b);
  if (is_literal_type(b))
    return false;
  return _types.at(a).ancestors.test(b);
}

GlbResult TypeHierarchy::glb(TypeId a, TypeId b) const {
  if (a == b)
    return {GlbResult::Ok, a};
  if (is_literal_type(a) || is_literal_type(b)) {
    if (is_literal_type(a) && is_literal_type(b))
      return {GlbResult::None, 0}; // distinct literals never meet
    TypeId lit = is_literal_type(a) ? a : b;
    TypeId other = is_literal_type(a) ? b : a;
    if (subtype(string_type(), other) || other == string_type())
      return {GlbResult::Ok, lit};
    return {GlbResult::None, 0};
  }
  if (a > b)
    std::swap(a, b);
  uint64_t key = (uint64_t(a) << 32) | b;
  auto it = _glb_cache.find(key);
  if (it != _glb_cache.end())
    return it->second;
  GlbResult r = glb_declared(a, b);
  _glb_cache.emplace(key, r);
  return r;
}

GlbResult TypeHierarchy::glb_declared(TypeId a, TypeId b) const {
  if (_types[a].ancestors.test(b))
    return {GlbResult::Ok, a};
  if (_types[b].ancestors.test(a))
    return {GlbResult::Ok, b};
  std::vector<uint32_t> common =
      Bits::intersect(_types[a].descendants, _types[b].descendants);
  if (common.empty())
    return {GlbResult::None, 0};
  // Maximal members: their ancestor set meets the common set only in themselves.
  GlbResult out{GlbResult::None, 0};
  for (uint32_t t : common) {
    bool maximal = true;
    for (uint32_t u : common) {
      if (u != t && _types[t].ancestors.test(u)) {
        maximal = false;
        break;
      }
    }
    if (!maximal)
      continue;
    if (out.state == GlbResult::Ok)
      return {GlbResult::Ambiguous, 0};
    out = {GlbResult::Ok, t};
  }
  return out;
}

const FeatList &TypeHierarchy::appropriate(TypeId t) const {
  if (is_literal_type(t)) {
    static const FeatList empty;
    return empty;
  }
  return _types.at(t).feats;
}

std::optional<TypeId> TypeHierarchy::restriction(TypeId t, FeatId f) const {
  const FeatList &fl = appropriate(t);
  for (const auto &[ff, restr] : fl)
    if (ff == f)
      return restr;
  return std::nullopt;
}

bool TypeHierarchy::feature_possible(TypeId t, FeatId f) const {
  if (is_literal_type(t))
    return false;
  if (f >= _feat_bearers.size())
    return false;
  return !Bits::intersect(_types.at(t).descendants, _feat_bearers[f]).empty();
}

GlbResult TypeHierarchy::coerce_for_feature(TypeId t, FeatId f) const {
  if (restriction(t, f))
    return {GlbResult::Ok, t};
  if (is_literal_type(t) || f >= _feat_bearers.size())
    return {GlbResult::None, 0};
  std::vector<uint32_t> bearers =
      Bits::intersect(_types.at(t).descendants, _feat_bearers[f]);
  if (bearers.empty())
    return {GlbResult::None, 0};
  GlbResult out{GlbResult::None, 0};
  for (uint32_t c : bearers) {
    bool maximal = true;
    for (uint32_t u : bearers) {
      if (u != c && u != t && _types[c].ancestors.test(u)) {
        maximal = false;
        break;
      }
    }
    if (!maximal)
      continue;
    if (out.state == GlbResult::Ok)
      return {GlbResult::Ambiguous, 0};
    out = {GlbResult::Ok, c};
  }
  return out;
}

TypeId TypeHierarchy::string_type() const {
  if (!_string_type) {
    auto it = _byname.find("string");
    if (it == _byname.end())
      throw LoadError("grammar declares no 'string' type but string values are used");
    _string_type = it->second;
  }
  return *_string_type;
}

} // namespace morphounify
