#include "morphounify/fs.hpp"

#include <algorithm>
#include <sstream>

#include "morphounify/chars.hpp"

namespace morphounify {

namespace {
constexpr size_t kAgendaStepLimit = 1000000;
} // namespace

void GrammarCore::resolve_lists() {
  auto l = hierarchy.find_type("list");
  auto e = hierarchy.find_type("elist");
  auto n = hierarchy.find_type("nelist");
  if (!l || !e || !n)
    return;
  ListTypes lt;
  lt.list = *l;
  lt.elist = *e;
  lt.nelist = *n;
  auto first = hierarchy.find_feature("first");
  auto rest = hierarchy.find_feature("rest");
  if (!first || !rest || !hierarchy.restriction(*n, *first) ||
      !hierarchy.restriction(*n, *rest))
    throw LoadError("nelist must be declared with 'first' and 'rest' features");
  lt.first = *first;
  lt.rest = *rest;
  lists = lt;
}

Engine::Engine(std::shared_ptr<const GrammarCore> core) : _core(std::move(core)) {
  if (!_core)
    throw EngineError("engine constructed without a grammar core");
}

// -- node construction -------------------------------------------------------

NodeId Engine::make_node(TypeId t, bool license_it) {
  NodeId id = static_cast<NodeId>(_nodes.size());
  Node nd;
  nd.type = t;
  _nodes.push_back(std::move(nd));
  _trail.push_back({TrailEntry::NodeCreated, id});
  if (license_it)
    license(id);
  return id;
}

void Engine::license(NodeId n) {
  TypeId t = at(n).type;
  bool any = false;
  const auto& items = _core->constraints.items;
  for (uint32_t i = 0; i < items.size(); ++i) {
    if (hierarchy().glb(t, items[i].anchor).state == GlbResult::None)
      continue;
    GoalId g = make_goal(GoalKind::Constraint, i, {n});
    _goals[g].watch.push_back(n);
    attach(n, g);
    any = true;
  }
  if (any)
    enqueue(n);
}

NodeId Engine::new_node(TypeId t) {
  if (is_literal_type(t)) {
    if (t - kLiteralBase >= _literals.size())
      throw EngineError("unknown literal type id");
  } else if (t >= hierarchy().type_count()) {
    throw EngineError("unknown type id");
  }
  Checkpoint cp = checkpoint();
  NodeId n = make_node(t, true);
  if (!run_agenda()) {
    undo_to(cp);
    throw EngineError("grammar constraints fail on a fresh '" +
                      hierarchy().type_name(t) + "' node");
  }
  return n;
}

TypeId Engine::intern_literal(std::u32string_view s) {
  std::u32string key(s);
  auto it = _literal_ids.find(key);
  if (it != _literal_ids.end())
    return it->second;
  hierarchy().string_type(); // a grammar without 'string' cannot hold literals
  TypeId id = kLiteralBase + static_cast<TypeId>(_literals.size());
  _literals.push_back(key);
  _literal_ids.emplace(std::move(key), id);
  _trail.push_back({TrailEntry::LiteralMade, id});
  return id;
}

NodeId Engine::new_string(std::u32string_view s) {
  TypeId lit = intern_literal(s);
  Checkpoint cp = checkpoint();
  NodeId n = make_node(lit, true);
  if (!run_agenda()) {
    undo_to(cp);
    throw EngineError("grammar constraints fail on a string node");
  }
  return n;
}

const std::u32string& Engine::literal_value(TypeId t) const {
  if (!is_literal_type(t) || t - kLiteralBase >= _literals.size())
    throw EngineError("literal_value on a non-literal type");
  return _literals[t - kLiteralBase];
}

// -- access ------------------------------------------------------------------

NodeId Engine::deref(NodeId n) const {
  if (n >= _nodes.size())
    throw EngineError("dangling node id");
  while (_nodes[n].forward != kNoNode)
    n = _nodes[n].forward;
  return n;
}

TypeId Engine::type_of(NodeId n) const { return at(deref(n)).type; }

bool Engine::instantiated(NodeId n) const { return at(deref(n)).instantiated; }

bool Engine::is_string(NodeId n) const {
  if (!hierarchy().has_string_type())
    return false;
  return hierarchy().subtype(type_of(n), hierarchy().string_type());
}

bool Engine::ground_string(NodeId n) const { return is_literal_type(type_of(n)); }

std::optional<std::u32string> Engine::string_value(NodeId n) const {
  TypeId t = type_of(n);
  if (!is_literal_type(t))
    return std::nullopt;
  return literal_value(t);
}

const std::vector<std::pair<FeatId, NodeId>>& Engine::features(NodeId n) const {
  return at(deref(n)).feats;
}

std::optional<NodeId> Engine::peek_path(NodeId n, const FeaturePath& p) const {
  n = deref(n);
  for (FeatId f : p) {
    const Node& nd = at(n);
    if (!nd.instantiated)
      return std::nullopt;
    auto it = std::find_if(nd.feats.begin(), nd.feats.end(),
                           [f](const auto& e) { return e.first == f; });
    if (it == nd.feats.end())
      return std::nullopt;
    n = deref(it->second);
  }
  return n;
}

// -- instantiation and path access --------------------------------------------

void Engine::instantiate(NodeId n) {
  TypeId t = at(n).type;
  _trail.push_back({TrailEntry::Instantiated, n});
  at(n).instantiated = true;
  for (const auto& [f, restr] : hierarchy().appropriate(t)) {
    NodeId child = make_node(restr, true);
    at(n).feats.emplace_back(f, child);
    _trail.push_back({TrailEntry::FeatAdded, n});
  }
}

NodeId Engine::feature_child(NodeId n, FeatId f) {
  if (!at(n).instantiated)
    instantiate(n);
  const Node& nd = at(n);
  for (const auto& [ff, v] : nd.feats)
    if (ff == f)
      return v;
  throw EngineError("feature '" + hierarchy().feature_name(f) +
                    "' missing after instantiation of '" +
                    hierarchy().type_name(nd.type) + "'");
}

NodeId Engine::walk_force(NodeId root, const FeaturePath& p, bool* failed) {
  NodeId n = root;
  for (FeatId f : p) {
    n = deref(n);
    TypeId t = at(n).type;
    if (!hierarchy().restriction(t, f)) {
      GlbResult c = hierarchy().coerce_for_feature(t, f);
      if (!c.ok() || !retype_node(n, c.type)) {
        *failed = true;
        return kNoNode;
      }
    }
    n = feature_child(n, f);
  }
  return deref(n);
}

bool Engine::retype_node(NodeId n, TypeId target) {
  TypeId t = at(n).type;
  GlbResult g = hierarchy().glb(t, target);
  if (!g.ok())
    return false;
  if (g.type == t)
    return true;
  _trail.push_back({TrailEntry::Retyped, n, t});
  at(n).type = g.type;
  // Well-typing: existing feature values meet the narrowed restrictions, and
  // an instantiated dag grows any features the new type introduces.
  size_t existing = at(n).feats.size();
  for (size_t i = 0; i < existing; ++i) {
    auto [f, v] = at(n).feats[i];
    auto restr = hierarchy().restriction(g.type, f);
    if (!restr)
      throw EngineError("feature lost while retyping '" +
                        hierarchy().type_name(t) + "'");
    if (!retype_node(deref(v), *restr))
      return false;
  }
  if (at(n).instantiated) {
    for (const auto& [f, restr] : hierarchy().appropriate(g.type)) {
      const auto& feats = at(n).feats;
      bool present = std::any_of(feats.begin(), feats.end(),
                                 [f = f](const auto& e) { return e.first == f; });
      if (present)
        continue;
      NodeId child = make_node(restr, true);
      at(n).feats.emplace_back(f, child);
      _trail.push_back({TrailEntry::FeatAdded, n});
    }
  }
  enqueue(n);
  return true;
}

// -- unification ---------------------------------------------------------------

bool Engine::unify_nodes(NodeId a, NodeId b) {
  a = deref(a);
  b = deref(b);
  if (a == b)
    return true;
  GlbResult g = hierarchy().glb(at(a).type, at(b).type);
  if (!g.ok())
    return false;
  // The representative keeps its dag; prefer the instantiated side.
  if (!at(a).instantiated && at(b).instantiated)
    std::swap(a, b);
  _trail.push_back({TrailEntry::Forwarded, b});
  at(b).forward = a;
  for (GoalId gl : at(b).goals)
    if (_goals[gl].state == GoalState::Pending)
      attach(a, gl);
  if (!retype_node(a, g.type))
    return false;
  if (at(b).instantiated) {
    const std::vector<std::pair<FeatId, NodeId>> bfeats = at(b).feats;
    for (const auto& [f, vb] : bfeats) {
      NodeId va = kNoNode;
      for (const auto& [ff, v] : at(a).feats)
        if (ff == f) {
          va = v;
          break;
        }
      if (va == kNoNode)
        throw EngineError("well-typing violated while merging dags");
      if (!unify_nodes(va, vb))
        return false;
    }
  }
  enqueue(a);
  return true;
}

bool Engine::unify(NodeId a, NodeId b) {
  Checkpoint cp = checkpoint();
  if (unify_nodes(a, b) && run_agenda())
    return true;
  undo_to(cp);
  return false;
}

bool Engine::retype(NodeId n, TypeId t) {
  Checkpoint cp = checkpoint();
  if (retype_node(deref(n), t) && run_agenda())
    return true;
  undo_to(cp);
  return false;
}

std::optional<NodeId> Engine::path_get(NodeId n, const FeaturePath& p) {
  Checkpoint cp = checkpoint();
  bool failed = false;
  NodeId r = walk_force(n, p, &failed);
  if (!failed && run_agenda())
    return deref(r);
  undo_to(cp);
  return std::nullopt;
}

bool Engine::path_put(NodeId n, const FeaturePath& p, NodeId v) {
  Checkpoint cp = checkpoint();
  bool failed = false;
  NodeId r = walk_force(n, p, &failed);
  if (!failed && unify_nodes(r, v) && run_agenda())
    return true;
  undo_to(cp);
  return false;
}

bool Engine::put_type(NodeId n, const FeaturePath& p, TypeId t) {
  Checkpoint cp = checkpoint();
  bool failed = false;
  NodeId r = walk_force(n, p, &failed);
  if (!failed && retype_node(r, t) && run_agenda())
    return true;
  undo_to(cp);
  return false;
}

bool Engine::put_string(NodeId n, const FeaturePath& p, std::u32string_view s) {
  return path_put(n, p, new_string(s));
}

// -- trail --------------------------------------------------------------------

Checkpoint Engine::checkpoint() const {
  if (!_agenda.empty())
    throw EngineError("checkpoint during active propagation");
  return {_trail.size(),          _nodes.size(),     _goals.size(),
          _saved_watches.size(),  _scheduled.size(), _literals.size()};
}

void Engine::undo_to(const Checkpoint& c) {
  if (c.trail > _trail.size())
    throw EngineError("undo target is ahead of the trail");
  while (_trail.size() > c.trail) {
    TrailEntry e = _trail.back();
    _trail.pop_back();
    switch (e.tag) {
    case TrailEntry::NodeCreated:
      _nodes.pop_back();
      break;
    case TrailEntry::GoalCreated:
      _goals.pop_back();
      break;
    case TrailEntry::Forwarded:
      _nodes[e.a].forward = kNoNode;
      break;
    case TrailEntry::Retyped:
      _nodes[e.a].type = e.b;
      break;
    case TrailEntry::Instantiated:
      _nodes[e.a].instantiated = false;
      break;
    case TrailEntry::FeatAdded:
      _nodes[e.a].feats.pop_back();
      break;
    case TrailEntry::GoalAttached:
      _nodes[e.a].goals.pop_back();
      break;
    case TrailEntry::GoalDetached:
      _nodes[e.a].goals.insert(_nodes[e.a].goals.begin() + e.c, e.b);
      break;
    case TrailEntry::GoalStateSet:
      _goals[e.a].state = static_cast<GoalState>(e.b);
      break;
    case TrailEntry::GoalRewatched:
      _goals[e.a].watch = std::move(_saved_watches.back());
      _saved_watches.pop_back();
      break;
    case TrailEntry::LiteralMade:
      _literal_ids.erase(_literals.back());
      _literals.pop_back();
      break;
    case TrailEntry::ScheduledPushed:
      _scheduled.pop_back();
      break;
    }
  }
  _agenda.clear();
  if (_nodes.size() != c.nodes || _goals.size() != c.goals ||
      _saved_watches.size() != c.saved || _scheduled.size() != c.scheduled ||
      _literals.size() != c.literals)
    throw EngineError("trail out of sync with store");
}

// -- goal machinery ------------------------------------------------------------

GoalId Engine::make_goal(GoalKind kind, uint32_t constraint, std::vector<NodeId> args) {
  GoalId id = static_cast<GoalId>(_goals.size());
  Goal g;
  g.kind = kind;
  g.constraint = constraint;
  g.args = std::move(args);
  _goals.push_back(std::move(g));
  _trail.push_back({TrailEntry::GoalCreated, id});
  return id;
}

void Engine::attach(NodeId n, GoalId g) {
  at(n).goals.push_back(g);
  _trail.push_back({TrailEntry::GoalAttached, n, g});
}

void Engine::set_state(GoalId g, GoalState s) {
  _trail.push_back({TrailEntry::GoalStateSet, g, static_cast<uint32_t>(_goals[g].state)});
  _goals[g].state = s;
}

void Engine::set_watch(GoalId g, std::vector<NodeId> w) {
  std::vector<NodeId> old = _goals[g].watch;
  for (NodeId n : old) {
    NodeId d = deref(n);
    auto& list = at(d).goals;
    auto it = std::find(list.begin(), list.end(), g);
    if (it == list.end())
      throw EngineError("goal watch list out of sync");
    uint32_t idx = static_cast<uint32_t>(it - list.begin());
    list.erase(it);
    _trail.push_back({TrailEntry::GoalDetached, d, g, idx});
  }
  for (NodeId n : w)
    attach(n, g);
  _trail.push_back({TrailEntry::GoalRewatched, g,
                    static_cast<uint32_t>(_saved_watches.size())});
  _saved_watches.push_back(std::move(old));
  _goals[g].watch = std::move(w);
}

void Engine::drop_watches(GoalId g) { set_watch(g, {}); }

void Engine::enqueue(NodeId n) { _agenda.push_back(n); }

bool Engine::run_agenda() {
  size_t steps = 0;
  while (!_agenda.empty()) {
    if (++steps > kAgendaStepLimit)
      throw EngineError("constraint agenda did not quiesce");
    NodeId n = deref(_agenda.back());
    _agenda.pop_back();
    const std::vector<GoalId> snapshot = at(n).goals;
    for (GoalId g : snapshot) {
      if (_goals[g].state != GoalState::Pending)
        continue;
      if (!recheck(g))
        return false;
    }
  }
  return true;
}

bool Engine::recheck(GoalId g) {
  std::vector<NodeId> watch;
  Verdict v = check_goal(g, watch);
  switch (v) {
  case Verdict::Satisfied:
    if (_goals[g].kind == GoalKind::Morphology) {
      set_state(g, GoalState::Scheduled);
      drop_watches(g);
      _scheduled.push_back(g);
      _trail.push_back({TrailEntry::ScheduledPushed});
      trace("schedule " + describe(g));
      return true;
    }
    set_state(g, GoalState::Fired);
    drop_watches(g);
    trace("fire " + describe(g));
    if (!fire(g)) {
      trace("fail " + describe(g));
      return false;
    }
    return true;
  case Verdict::Incompatible:
    if (_goals[g].kind == GoalKind::Concat || _goals[g].kind == GoalKind::Morphology) {
      trace("unsatisfiable " + describe(g));
      return false;
    }
    set_state(g, GoalState::Discarded);
    drop_watches(g);
    trace("discard " + describe(g));
    return true;
  case Verdict::Undetermined: {
    // Normalize and deduplicate the watch set before (re)registering.
    std::vector<NodeId> w;
    for (NodeId n : watch) {
      NodeId d = deref(n);
      if (std::find(w.begin(), w.end(), d) == w.end())
        w.push_back(d);
    }
    if (w.empty())
      throw EngineError("undetermined goal with an empty watch set");
    set_watch(g, std::move(w));
    return true;
  }
  }
  return true;
}

Engine::Verdict Engine::type_req(NodeId n, TypeId t, ReqMode mode) const {
  TypeId cur = at(n).type;
  if (hierarchy().subtype(cur, t) && (mode == ReqMode::Subtype || cur != t))
    return Verdict::Satisfied;
  if (hierarchy().glb(cur, t).state == GlbResult::None)
    return Verdict::Incompatible;
  return Verdict::Undetermined;
}

Engine::Verdict Engine::check_constraint(const ConditionalConstraint& c, NodeId root,
                                         std::vector<NodeId>& watch) {
  root = deref(root);
  Verdict overall = Verdict::Satisfied;
  Verdict va = type_req(root, c.anchor, ReqMode::Subtype);
  if (va == Verdict::Incompatible)
    return Verdict::Incompatible;
  if (va == Verdict::Undetermined) {
    watch.push_back(root);
    overall = Verdict::Undetermined;
  }
  for (const auto& req : c.reqs) {
    // Antecedent walk: instantiating but never coercing.  A node whose type
    // does not yet bear the feature blocks, and the goal watches it.
    NodeId n = root;
    bool blocked = false;
    for (FeatId f : req.path) {
      n = deref(n);
      TypeId t = at(n).type;
      if (hierarchy().restriction(t, f)) {
        n = feature_child(n, f);
      } else if (hierarchy().feature_possible(t, f)) {
        watch.push_back(n);
        blocked = true;
        break;
      } else {
        return Verdict::Incompatible;
      }
    }
    if (blocked) {
      overall = Verdict::Undetermined;
      continue;
    }
    n = deref(n);
    Verdict vr = type_req(n, req.type, req.mode);
    if (vr == Verdict::Incompatible)
      return Verdict::Incompatible;
    if (vr == Verdict::Undetermined) {
      watch.push_back(n);
      overall = Verdict::Undetermined;
    }
  }
  return overall;
}

Engine::Verdict Engine::check_goal(GoalId g, std::vector<NodeId>& watch) {
  Goal& gl = _goals[g];
  switch (gl.kind) {
  case GoalKind::Constraint:
    return check_constraint(_core->constraints.items[gl.constraint], gl.args[0], watch);
  case GoalKind::AppendEmpty:
  case GoalKind::AppendNonempty: {
    const ListTypes& lt = lists();
    bool empty_clause = gl.kind == GoalKind::AppendEmpty;
    NodeId x = deref(gl.args[0]);
    Verdict v = type_req(x, empty_clause ? lt.elist : lt.nelist, ReqMode::Subtype);
    if (v != Verdict::Undetermined)
      return v;
    // The first argument alone is undecided, but closed spines on the other
    // two still pick the clause by plain length arithmetic.  Walks are capped
    // so a cyclic spine counts as open instead of hanging.
    auto spine = [&](NodeId n) -> std::pair<std::optional<size_t>, NodeId> {
      size_t len = 0;
      for (size_t cap = _nodes.size() + 1; cap > 0; --cap) {
        n = deref(n);
        if (at(n).type == lt.elist)
          return {len, n};
        auto r = at(n).type == lt.nelist ? peek_path(n, {lt.rest}) : std::nullopt;
        if (!r)
          return {std::nullopt, n};
        n = *r;
        ++len;
      }
      return {std::nullopt, n};
    };
    auto [lz, tz] = spine(gl.args[2]);
    auto [ly, ty] = spine(gl.args[1]);
    if (lz && ly) {
      // When the result is shorter than the suffix there is no solution; the
      // empty clause still reports Satisfied so its unification of the two
      // mismatched spines carries the failure (a discard would be vacuous).
      bool viable = empty_clause ? *lz <= *ly : *lz > *ly;
      return viable ? Verdict::Satisfied : Verdict::Incompatible;
    }
    if (lz && *lz == 0) // an empty result forces both inputs empty
      return empty_clause ? Verdict::Satisfied : Verdict::Incompatible;
    watch.push_back(x);
    watch.push_back(tz);
    watch.push_back(ty);
    return Verdict::Undetermined;
  }
  case GoalKind::Concat: {
    NodeId n[3];
    bool ground[3];
    for (int i = 0; i < 3; ++i) {
      n[i] = deref(gl.args[i]);
      TypeId t = at(n[i]).type;
      ground[i] = is_literal_type(t);
      if (!ground[i] &&
          hierarchy().glb(t, hierarchy().string_type()).state == GlbResult::None)
        return Verdict::Incompatible;
    }
    if ((ground[0] && ground[1]) || (ground[2] && (ground[0] || ground[1])))
      return Verdict::Satisfied;
    for (int i = 0; i < 3; ++i)
      if (!ground[i])
        watch.push_back(n[i]);
    return Verdict::Undetermined;
  }
  case GoalKind::Morphology: {
    NodeId m = deref(gl.args[0]);
    NodeId p = deref(gl.args[1]);
    for (NodeId x : {m, p}) {
      TypeId t = at(x).type;
      if (!is_literal_type(t) &&
          hierarchy().glb(t, hierarchy().string_type()).state == GlbResult::None)
        return Verdict::Incompatible;
    }
    if (is_literal_type(at(m).type) || is_literal_type(at(p).type))
      return Verdict::Satisfied;
    watch.push_back(m);
    watch.push_back(p);
    return Verdict::Undetermined;
  }
  }
  throw EngineError("corrupt goal kind");
}

// -- firing ----------------------------------------------------------------------

bool Engine::fire(GoalId g) {
  switch (_goals[g].kind) {
  case GoalKind::Constraint:
    return fire_constraint(g);
  case GoalKind::AppendEmpty:
    return fire_append_empty(g);
  case GoalKind::AppendNonempty:
    return fire_append_nonempty(g);
  case GoalKind::Concat:
    return fire_concat(g);
  case GoalKind::Morphology:
    break;
  }
  throw EngineError("morphology goals are scheduled, never fired internally");
}

NodeId Engine::resolve_term(const ConsTerm& t, NodeId root, std::vector<NodeId>& vars,
                            bool* failed) {
  switch (t.kind) {
  case ConsTerm::Path:
    return walk_force(root, t.path, failed);
  case ConsTerm::Var:
    if (t.var >= vars.size())
      throw EngineError("constraint variable out of range");
    if (vars[t.var] == kNoNode)
      vars[t.var] = make_node(kTopType, true);
    return vars[t.var];
  case ConsTerm::TypeConst:
    return make_node(t.type, true);
  case ConsTerm::StrConst:
    return make_node(intern_literal(t.str), true);
  }
  throw EngineError("corrupt consequent term");
}

bool Engine::fire_constraint(GoalId g) {
  const ConditionalConstraint& c = _core->constraints.items[_goals[g].constraint];
  NodeId root = deref(_goals[g].args[0]);
  std::vector<NodeId> vars(c.var_count, kNoNode);
  bool failed = false;
  for (const auto& eq : c.equations) {
    NodeId l = resolve_term(eq.lhs, root, vars, &failed);
    if (failed)
      return false;
    NodeId r = resolve_term(eq.rhs, root, vars, &failed);
    if (failed)
      return false;
    if (!unify_nodes(l, r))
      return false;
  }
  for (const auto& rel : c.relations) {
    std::vector<NodeId> args;
    for (const auto& t : rel.args) {
      NodeId n = resolve_term(t, root, vars, &failed);
      if (failed)
        return false;
      args.push_back(n);
    }
    spawn_relation(rel.rel, std::move(args));
  }
  return true;
}

bool Engine::fire_append_empty(GoalId g) {
  // The clause may have been picked by length arithmetic, so x still needs
  // its shape imposed here.
  if (!retype_node(deref(_goals[g].args[0]), lists().elist))
    return false;
  return unify_nodes(_goals[g].args[1], _goals[g].args[2]);
}

bool Engine::fire_append_nonempty(GoalId g) {
  const ListTypes& lt = lists();
  if (!retype_node(deref(_goals[g].args[0]), lt.nelist) ||
      !retype_node(deref(_goals[g].args[2]), lt.nelist))
    return false;
  NodeId x = deref(_goals[g].args[0]);
  NodeId z = deref(_goals[g].args[2]);
  if (!unify_nodes(feature_child(x, lt.first), feature_child(deref(z), lt.first)))
    return false;
  NodeId rx = feature_child(deref(x), lt.rest);
  NodeId rz = feature_child(deref(z), lt.rest);
  spawn_relation(BuiltinRel::FsAppend, {rx, _goals[g].args[1], rz});
  return true;
}

bool Engine::fire_concat(GoalId g) {
  NodeId a = deref(_goals[g].args[0]);
  NodeId b = deref(_goals[g].args[1]);
  NodeId c = deref(_goals[g].args[2]);
  auto sa = string_value(a), sb = string_value(b), sc = string_value(c);
  // Raw creation here: firing happens mid-propagation, where the public
  // constructors (which checkpoint) must not be used.
  auto lit = [this](const std::u32string& s) { return make_node(intern_literal(s), true); };
  if (sa && sb)
    return unify_nodes(c, lit(*sa + *sb));
  if (sc && sa) {
    if (sa->size() > sc->size() || sc->compare(0, sa->size(), *sa) != 0)
      return false;
    return unify_nodes(b, lit(sc->substr(sa->size())));
  }
  if (sc && sb) {
    if (sb->size() > sc->size() ||
        sc->compare(sc->size() - sb->size(), sb->size(), *sb) != 0)
      return false;
    return unify_nodes(a, lit(sc->substr(0, sc->size() - sb->size())));
  }
  throw EngineError("concat fired without enough ground arguments");
}

void Engine::spawn_relation(BuiltinRel rel, std::vector<NodeId> args) {
  switch (rel) {
  case BuiltinRel::FsAppend: {
    if (args.size() != 3)
      throw EngineError("fs_append expects three arguments");
    lists(); // fail early when the grammar lacks list machinery
    NodeId x = deref(args[0]);
    for (GoalKind k : {GoalKind::AppendEmpty, GoalKind::AppendNonempty}) {
      GoalId g = make_goal(k, 0, args);
      _goals[g].watch.push_back(x);
      attach(x, g);
    }
    enqueue(x);
    return;
  }
  case BuiltinRel::Concat: {
    if (args.size() != 3)
      throw EngineError("concat expects three arguments");
    GoalId g = make_goal(GoalKind::Concat, 0, args);
    for (NodeId n : args) {
      NodeId d = deref(n);
      if (std::find(_goals[g].watch.begin(), _goals[g].watch.end(), d) ==
          _goals[g].watch.end()) {
        _goals[g].watch.push_back(d);
        attach(d, g);
      }
    }
    enqueue(deref(args[0]));
    return;
  }
  case BuiltinRel::Morphology: {
    if (args.size() != 3)
      throw EngineError("morphology expects mstring, phon and morph arguments");
    GoalId g = make_goal(GoalKind::Morphology, 0, args);
    for (int i = 0; i < 2; ++i) {
      NodeId d = deref(args[i]);
      if (std::find(_goals[g].watch.begin(), _goals[g].watch.end(), d) ==
          _goals[g].watch.end()) {
        _goals[g].watch.push_back(d);
        attach(d, g);
      }
    }
    enqueue(deref(args[0]));
    return;
  }
  }
  throw EngineError("corrupt relation kind");
}

const ListTypes& Engine::lists() const {
  if (!_core->lists)
    throw LoadError("fs_append requires list, elist and nelist types");
  return *_core->lists;
}

bool Engine::call_fs_append(NodeId x, NodeId y, NodeId z) {
  Checkpoint cp = checkpoint();
  spawn_relation(BuiltinRel::FsAppend, {x, y, z});
  if (run_agenda())
    return true;
  undo_to(cp);
  return false;
}

bool Engine::call_concat(NodeId a, NodeId b, NodeId c) {
  Checkpoint cp = checkpoint();
  spawn_relation(BuiltinRel::Concat, {a, b, c});
  if (run_agenda())
    return true;
  undo_to(cp);
  return false;
}

bool Engine::call_morphology(NodeId mstring, NodeId phon, NodeId morph) {
  Checkpoint cp = checkpoint();
  spawn_relation(BuiltinRel::Morphology, {mstring, phon, morph});
  if (run_agenda())
    return true;
  undo_to(cp);
  return false;
}

// -- inspection -------------------------------------------------------------------

std::vector<GoalId> Engine::pending_goals(NodeId n) const {
  std::vector<GoalId> out;
  for (GoalId g : at(deref(n)).goals)
    if (_goals[g].state == GoalState::Pending &&
        std::find(out.begin(), out.end(), g) == out.end())
      out.push_back(g);
  return out;
}

std::vector<GoalId> Engine::pending_goals() const {
  std::vector<GoalId> out;
  for (GoalId g = 0; g < _goals.size(); ++g)
    if (_goals[g].state == GoalState::Pending)
      out.push_back(g);
  return out;
}

std::vector<GoalId> Engine::scheduled_relations() const {
  std::vector<GoalId> out;
  for (GoalId g : _scheduled)
    if (_goals[g].state == GoalState::Scheduled)
      out.push_back(g);
  return out;
}

void Engine::resolve_scheduled(GoalId g) {
  if (_goals[g].state != GoalState::Scheduled)
    throw EngineError("resolve_scheduled on a goal that is not scheduled");
  set_state(g, GoalState::Fired);
}

std::vector<GoalId> Engine::sweep_pending() {
  std::vector<GoalId> out;
  size_t count = _goals.size();
  for (GoalId g = 0; g < count; ++g) {
    if (_goals[g].state != GoalState::Pending)
      continue;
    std::vector<NodeId> watch;
    if (check_goal(g, watch) != Verdict::Undetermined)
      out.push_back(g);
  }
  if (!run_agenda())
    throw EngineError("sweep uncovered a failing decidable goal");
  return out;
}

// -- subsumption --------------------------------------------------------------------

namespace {
// Handle for the right-hand side of a subsumption walk: a real node, or a
// synthetic stand-in for the implicit value under an uninstantiated dag.
constexpr uint64_t kSynthTag = uint64_t(1) << 40;
} // namespace

bool Engine::subsumes(NodeId a, NodeId b) const {
  struct Frame {
    NodeId a;
    uint64_t bkey; // node id, or kSynthTag | synth index
    TypeId btype;
  };
  std::unordered_map<NodeId, uint64_t> bound;
  uint32_t synths = 0;
  std::vector<Frame> stack;
  stack.push_back({deref(a), deref(b), type_of(b)});
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    NodeId x = deref(fr.a);
    auto it = bound.find(x);
    if (it != bound.end()) {
      if (it->second != fr.bkey)
        return false; // a shares here, b does not
      continue;
    }
    bound.emplace(x, fr.bkey);
    TypeId ta = at(x).type;
    if (!hierarchy().subtype(fr.btype, ta))
      return false;
    if (!at(x).instantiated)
      continue;
    bool breal = !(fr.bkey & kSynthTag);
    NodeId bn = breal ? static_cast<NodeId>(fr.bkey) : kNoNode;
    bool binst = breal && at(bn).instantiated;
    for (const auto& [f, va] : at(x).feats) {
      if (binst) {
        NodeId vb = kNoNode;
        for (const auto& [ff, v] : at(bn).feats)
          if (ff == f) {
            vb = v;
            break;
          }
        if (vb == kNoNode)
          return false;
        vb = deref(vb);
        stack.push_back({deref(va), vb, at(vb).type});
      } else {
        auto restr = hierarchy().restriction(fr.btype, f);
        if (!restr)
          return false;
        stack.push_back({deref(va), kSynthTag | synths++, *restr});
      }
    }
  }
  return true;
}

// -- copying ------------------------------------------------------------------------

NodeId Engine::copy_from(const Engine& src, NodeId root) {
  std::unordered_map<NodeId, NodeId> map;
  std::vector<NodeId> created;
  // Phase one builds the raw structure; phase two licenses it, so constraint
  // goals are derived afresh in this store against complete structure.
  struct Item {
    NodeId src;
    NodeId dst_parent;
    FeatId feat;
  };
  std::vector<Item> work;
  work.push_back({src.deref(root), kNoNode, 0});
  NodeId out = kNoNode;
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    NodeId sn = src.deref(item.src);
    NodeId nn;
    auto it = map.find(sn);
    if (it != map.end()) {
      nn = it->second;
    } else {
      TypeId t = src.at(sn).type;
      if (is_literal_type(t))
        t = intern_literal(src.literal_value(t));
      nn = make_node(t, false);
      map.emplace(sn, nn);
      created.push_back(nn);
      if (src.at(sn).instantiated) {
        _trail.push_back({TrailEntry::Instantiated, nn});
        at(nn).instantiated = true;
        const auto feats = src.at(sn).feats;
        // Reverse keeps sibling processing in declaration order off the stack.
        for (auto rit = feats.rbegin(); rit != feats.rend(); ++rit)
          work.push_back({rit->second, nn, rit->first});
      }
    }
    if (item.dst_parent == kNoNode) {
      out = nn;
    } else {
      at(item.dst_parent).feats.emplace_back(item.feat, nn);
      _trail.push_back({TrailEntry::FeatAdded, item.dst_parent});
    }
  }
  for (NodeId n : created)
    license(n);
  if (!run_agenda())
    throw EngineError("grammar constraints fail on a copied structure");
  return out;
}

NodeId Engine::copy(NodeId root) { return copy_from(*this, root); }

// -- misc -----------------------------------------------------------------------------

std::string Engine::fingerprint() const {
  std::ostringstream os;
  for (NodeId n = 0; n < _nodes.size(); ++n) {
    const Node& nd = _nodes[n];
    os << 'N' << n << ':' << nd.type << '/' << static_cast<int64_t>(nd.forward == kNoNode ? -1 : nd.forward)
       << '/' << nd.instantiated << "[";
    for (const auto& [f, v] : nd.feats)
      os << f << '=' << v << ' ';
    os << "](";
    for (GoalId g : nd.goals)
      os << g << ' ';
    os << ")\n";
  }
  for (GoalId g = 0; g < _goals.size(); ++g) {
    const Goal& gl = _goals[g];
    os << 'G' << g << ':' << static_cast<int>(gl.kind) << '/'
       << static_cast<int>(gl.state) << '/' << gl.constraint << "[";
    for (NodeId n : gl.args)
      os << n << ' ';
    os << "](";
    for (NodeId n : gl.watch)
      os << n << ' ';
    os << ")\n";
  }
  os << "S[";
  for (GoalId g : _scheduled)
    os << g << ' ';
  os << "]\nL[";
  for (const auto& s : _literals)
    os << u32_to_utf8(s) << '|';
  os << "]\n";
  return os.str();
}

std::string Engine::describe(GoalId g) const {
  const Goal& gl = _goals[g];
  switch (gl.kind) {
  case GoalKind::Constraint:
    return "constraint '" + _core->constraints.items[gl.constraint].name + "'";
  case GoalKind::AppendEmpty:
    return "fs_append/empty";
  case GoalKind::AppendNonempty:
    return "fs_append/cons";
  case GoalKind::Concat:
    return "concat";
  case GoalKind::Morphology:
    return "morphology";
  }
  return "goal";
}

} // namespace morphounify
