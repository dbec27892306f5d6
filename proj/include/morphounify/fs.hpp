/* feature-structure store: union-find unification, undo trail, delayed goals */

#ifndef MORPHOUNIFY_FS_HPP
#define MORPHOUNIFY_FS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphounify/constraints.hpp"
#include "morphounify/errors.hpp"
#include "morphounify/types.hpp"

namespace morphounify {

using NodeId = uint32_t;
using GoalId = uint32_t;
constexpr NodeId kNoNode = 0xFFFFFFFFu;

enum class GoalState : uint8_t {
  Pending,   // antecedent undetermined, watching nodes
  Scheduled, // relation ready for the external solver (morphology)
  Fired,     // consequent enforced
  Discarded, // antecedent incompatible, vacuously satisfied
};

enum class GoalKind : uint8_t {
  Constraint,     // grammar conditional constraint; args = [root]
  AppendEmpty,    // fs_append clause for empty first arg; args = [x, y, z]
  AppendNonempty, // fs_append clause for nonempty first arg; args = [x, y, z]
  Concat,         // string concatenation; args = [a, b, c] with a.b = c
  Morphology,     // two-level relation; args = [mstring, phon, morph]
};

struct Goal {
  GoalKind kind;
  GoalState state = GoalState::Pending;
  uint32_t constraint = 0; // index into the core's constraint set
  std::vector<NodeId> args;
  std::vector<NodeId> watch; // nodes whose refinement may decide the goal
};

struct Checkpoint {
  size_t trail = 0, nodes = 0, goals = 0, saved = 0, scheduled = 0, literals = 0;
};

// A mutable store of typed feature structures over a shared grammar core.
// All mutation is trailed; undo_to() restores any earlier checkpoint.
// Unification failure is a normal outcome (false), never an exception.
class Engine {
public:
  explicit Engine(std::shared_ptr<const GrammarCore> core);

  const TypeHierarchy& hierarchy() const { return _core->hierarchy; }
  const GrammarCore& core() const { return *_core; }

  // -- construction ---------------------------------------------------------
  // New nodes are licensed: every grammar constraint whose anchor is
  // compatible with the node's type is registered as a pending goal.
  NodeId new_node(TypeId t);
  NodeId new_string(std::u32string_view s);
  TypeId intern_literal(std::u32string_view s);
  const std::u32string& literal_value(TypeId t) const;

  // -- basic access ---------------------------------------------------------
  NodeId deref(NodeId n) const;
  TypeId type_of(NodeId n) const;
  bool instantiated(NodeId n) const;
  bool is_string(NodeId n) const; // typed at or below the string type
  bool ground_string(NodeId n) const;
  std::optional<std::u32string> string_value(NodeId n) const;
  const std::vector<std::pair<FeatId, NodeId>>& features(NodeId n) const;
  size_t node_count() const { return _nodes.size(); }

  // -- mutation (each drains the wake agenda; false = failure, undone) ------
  bool unify(NodeId a, NodeId b);
  bool retype(NodeId n, TypeId t); // refine to glb(current, t)
  std::optional<NodeId> path_get(NodeId n, const FeaturePath& p);
  bool path_put(NodeId n, const FeaturePath& p, NodeId v);
  bool put_type(NodeId n, const FeaturePath& p, TypeId t);
  bool put_string(NodeId n, const FeaturePath& p, std::u32string_view s);

  // Read-only probe: no instantiation, no coercion.  Absent => nullopt.
  std::optional<NodeId> peek_path(NodeId n, const FeaturePath& p) const;

  // -- backtracking ---------------------------------------------------------
  Checkpoint checkpoint() const;
  void undo_to(const Checkpoint& c);

  // -- comparison -----------------------------------------------------------
  // subsumes(a, b): b carries every type, feature and sharing commitment of a.
  // Uninstantiated dags count as fully generic.
  bool subsumes(NodeId a, NodeId b) const;
  bool iso(NodeId a, NodeId b) const { return subsumes(a, b) && subsumes(b, a); }

  // -- copying --------------------------------------------------------------
  // Structure-preserving copy; the copy is re-licensed so its goals are
  // derived afresh in this store.  false-less: throws only on engine misuse.
  NodeId copy(NodeId root);
  NodeId copy_from(const Engine& src, NodeId root);

  // -- relational builtins (programmatic entry points) -----------------------
  bool call_fs_append(NodeId x, NodeId y, NodeId z);
  bool call_concat(NodeId a, NodeId b, NodeId c);
  bool call_morphology(NodeId mstring, NodeId phon, NodeId morph);

  // -- goal inspection ------------------------------------------------------
  const Goal& goal(GoalId g) const { return _goals[g]; }
  size_t goal_count() const { return _goals.size(); }
  std::vector<GoalId> pending_goals(NodeId n) const;
  std::vector<GoalId> pending_goals() const;
  std::vector<GoalId> scheduled_relations() const;
  // Mark a scheduled relation as resolved by the external solver (trailed).
  void resolve_scheduled(GoalId g);
  // Re-check every pending goal; returns those now decidable (should be
  // empty whenever the agenda has been drained -- the no-lost-wakeups sweep).
  std::vector<GoalId> sweep_pending();

  // Deterministic serialization of the entire store state, for exact
  // restore checks around checkpoints.
  std::string fingerprint() const;

  void set_trace(std::function<void(const std::string&)> fn) { _trace = std::move(fn); }

private:
  struct Node {
    TypeId type;
    NodeId forward = kNoNode;
    bool instantiated = false;
    std::vector<std::pair<FeatId, NodeId>> feats;
    std::vector<GoalId> goals; // pending goals watching this node
  };

  struct TrailEntry {
    enum Tag : uint8_t {
      NodeCreated,
      GoalCreated,
      Forwarded,      // a = node, b = old type of target kept implicitly? (node only)
      Retyped,        // a = node, b = old type
      Instantiated,   // a = node
      FeatAdded,      // a = node
      GoalAttached,   // a = node, b = goal
      GoalDetached,   // a = node, b = goal, c = index in list
      GoalStateSet,   // a = goal, b = old state
      GoalRewatched,  // a = goal, b = index into _saved_watches
      LiteralMade,    // a = literal id
      ScheduledPushed,
    } tag;
    uint32_t a = 0, b = 0, c = 0;
  };

  enum class Verdict : uint8_t { Satisfied, Incompatible, Undetermined };

  // node helpers
  Node& at(NodeId n) { return _nodes[n]; }
  const Node& at(NodeId n) const { return _nodes[n]; }
  NodeId make_node(TypeId t, bool license_it);
  void license(NodeId n);
  void instantiate(NodeId n);
  NodeId feature_child(NodeId n, FeatId f); // instantiating, non-coercing; n must bear f
  NodeId walk_force(NodeId root, const FeaturePath& p, bool* failed); // coercing
  bool retype_node(NodeId n, TypeId target); // glb-retype + well-typing sweep
  bool unify_nodes(NodeId a, NodeId b);

  // goal machinery
  GoalId make_goal(GoalKind kind, uint32_t constraint, std::vector<NodeId> args);
  void attach(NodeId n, GoalId g);
  void set_state(GoalId g, GoalState s);
  void set_watch(GoalId g, std::vector<NodeId> w);
  void drop_watches(GoalId g);
  void enqueue(NodeId n);
  bool run_agenda();
  bool recheck(GoalId g);
  Verdict check_goal(GoalId g, std::vector<NodeId>& watch);
  Verdict check_constraint(const ConditionalConstraint& c, NodeId root,
                           std::vector<NodeId>& watch);
  Verdict type_req(NodeId n, TypeId t, ReqMode mode) const;
  bool fire(GoalId g);
  bool fire_constraint(GoalId g);
  bool fire_append_empty(GoalId g);
  bool fire_append_nonempty(GoalId g);
  bool fire_concat(GoalId g);
  NodeId resolve_term(const ConsTerm& t, NodeId root, std::vector<NodeId>& vars,
                      bool* failed);
  void spawn_relation(BuiltinRel rel, std::vector<NodeId> args);
  const ListTypes& lists() const;

  void trace(const std::string& msg) const {
    if (_trace) _trace(msg);
  }
  std::string describe(GoalId g) const;

  std::shared_ptr<const GrammarCore> _core;
  std::vector<Node> _nodes;
  std::vector<Goal> _goals;
  std::vector<TrailEntry> _trail;
  std::vector<std::vector<NodeId>> _saved_watches;
  std::vector<GoalId> _scheduled;
  std::vector<NodeId> _agenda;
  std::vector<std::u32string> _literals; // literal id = kLiteralBase + index
  std::unordered_map<std::u32string, TypeId> _literal_ids;
  std::function<void(const std::string&)> _trace;
};

} // namespace morphounify

#endif
