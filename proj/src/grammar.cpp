/* session loading, the engine-backed sign client, analysis and generation */

#include "morphounify/grammar.hpp"

#include <algorithm>
#include <set>

#include "morphounify/chars.hpp"
#include "morphounify/errors.hpp"

namespace morphounify {

namespace {

TypeId need_type(const TypeHierarchy& h, const char* name) {
  if (auto t = h.find_type(name)) return *t;
  throw LoadError(std::string("the word grammar needs a '") + name + "' type");
}

FeatId need_feature(const TypeHierarchy& h, const char* name) {
  if (auto f = h.find_feature(name)) return *f;
  throw LoadError(std::string("the word grammar needs a '") + name + "' feature");
}

// Parses both texts and freezes the core; percolated and rules are filled
// through the out-parameters declared before `core` in the session.
std::shared_ptr<const GrammarCore> load_core(const std::string& grammar_text,
                                             const std::string& rules_text,
                                             std::vector<std::string>& percolated,
                                             CompiledRuleSet& rules) {
  GrammarFile gf = parse_grammar(grammar_text);
  RuleFile rf = parse_rule_file(rules_text, gf.core.hierarchy);
  percolated = std::move(gf.percolated);
  auto core = std::make_shared<GrammarCore>(std::move(gf.core));
  rules = compile_rules(std::move(rf.alphabet), std::move(rf.rules), core->hierarchy);
  return core;
}

// Sign client over a working engine.  In analysis mode it also composes the
// word: completed morphs commit one lexicon reading each, prefixes wait on
// the `awaiting` stack for their argument, and finish_word unifies the
// composition into the word's morph slot.  In generation/checking mode the
// sign is fixed and only the filter hooks are live.
struct EngineClient final : SignClient {
  Engine& eng;
  const Session& ses;
  NodeId word_morph;
  bool composing;
  TraceFn trace;

  NodeId cur = kNoNode;         // composition so far (outermost sign)
  bool proto = false;           // cur is a filter-only placeholder
  std::vector<NodeId> awaiting; // prefix functors with open argument slots

  struct Mark {
    Checkpoint cp;
    NodeId cur;
    bool proto;
    std::vector<NodeId> awaiting;
  };
  std::vector<Mark> marks;

  EngineClient(Engine& e, const Session& s, NodeId sign, bool compose_mode)
      : eng(e), ses(s), word_morph(sign), composing(compose_mode) {
    if (!composing) cur = sign;
  }

  // filters constrain the outermost sign; before any morph commits they go
  // into a placeholder that the first committed entry absorbs
  NodeId target() {
    if (!awaiting.empty()) return awaiting.front();
    if (cur == kNoNode) {
      cur = eng.new_node(ses.t_msign);
      proto = true;
    }
    return cur;
  }

  bool apply(const std::vector<FilterCond>& conds) {
    NodeId t = target();
    for (const auto& c : conds) {
      bool ok = c.literal ? eng.put_string(t, c.path, *c.literal)
                          : eng.put_type(t, c.path, c.type);
      if (!ok) return false;
    }
    return true;
  }

  bool assert_filter(const std::vector<FilterCond>& conds) override {
    Checkpoint cp = eng.checkpoint();
    NodeId saved = cur;
    bool saved_proto = proto;
    if (apply(conds)) return true;
    eng.undo_to(cp);
    cur = saved;
    proto = saved_proto;
    return false;
  }

  bool filter_compatible(const std::vector<FilterCond>& conds) override {
    Checkpoint cp = eng.checkpoint();
    NodeId saved = cur;
    bool saved_proto = proto;
    bool ok = apply(conds);
    eng.undo_to(cp);
    cur = saved;
    proto = saved_proto;
    return ok;
  }

  uint64_t mark() override {
    marks.push_back({eng.checkpoint(), cur, proto, awaiting});
    return marks.size() - 1;
  }

  void undo_to(uint64_t m) override {
    Mark k = std::move(marks[m]);
    marks.resize(m);
    eng.undo_to(k.cp);
    cur = k.cur;
    proto = k.proto;
    awaiting = std::move(k.awaiting);
  }

  size_t morph_alternatives(const std::u32string& morph) override {
    return composing ? ses.lexicon.morphs_for(morph).size() : 1;
  }

  bool select_morph(const std::u32string& morph, size_t alt) override {
    if (!composing) return true;
    const auto& ids = ses.lexicon.morphs_for(morph);
    if (alt >= ids.size()) return false;
    if (trace) trace("commit morph " + u32_to_utf8(morph));
    return attach(eng.copy_from(ses.templates, ses.lexicon.morph(ids[alt]).fs));
  }

  bool finish_word() override {
    if (!composing) return true;
    if (!awaiting.empty() || cur == kNoNode || proto) return false;
    if (trace) trace("close word");
    return eng.unify(word_morph, cur);
  }

  bool is(NodeId n, const std::optional<TypeId>& t) const {
    return t && eng.hierarchy().subtype(eng.type_of(n), *t);
  }

  // fill prefix argument slots now that their material is complete
  bool reduce() {
    while (!awaiting.empty() && cur != kNoNode && !proto) {
      NodeId f = awaiting.back();
      auto slot = eng.path_get(f, {ses.f_arg});
      if (!slot || !eng.unify(*slot, cur)) return false;
      cur = f;
      awaiting.pop_back();
    }
    return true;
  }

  bool attach(NodeId entry) {
    if (is(entry, ses.t_rightfunctor)) {
      if (cur == kNoNode || proto) return false; // a suffix needs a left argument
      auto slot = eng.path_get(entry, {ses.f_arg});
      if (!slot || !eng.unify(*slot, cur)) return false;
      cur = entry;
      return reduce();
    }
    if (is(entry, ses.t_leftfunctor)) {
      if (cur != kNoNode && !proto) return false; // prefixes precede their argument
      if (proto) { // the placeholder becomes the outermost functor
        if (!eng.unify(cur, entry)) return false;
        cur = kNoNode;
        proto = false;
      }
      awaiting.push_back(entry);
      return true;
    }
    // argument morphs: one stem per functor application
    if (cur == kNoNode) {
      cur = entry;
      return reduce();
    }
    if (proto) {
      if (!eng.unify(cur, entry)) return false;
      proto = false;
      return reduce();
    }
    return false;
  }
};

} // namespace

Session::Session(const std::string& grammar_text, const std::string& rules_text,
                 const std::string& morphs_text, const std::string& lexemes_text)
    : core(load_core(grammar_text, rules_text, percolated, rules)), templates(core) {
  load_morphs(templates, lexicon, rules.alphabet, morphs_text);
  load_lexemes(templates, lexicon, lexemes_text);

  const TypeHierarchy& h = core->hierarchy;
  t_word = need_type(h, "word");
  t_msign = need_type(h, "msign");
  t_mfunctor = h.find_type("mfunctor");
  t_leftfunctor = h.find_type("leftfunctor");
  t_rightfunctor = h.find_type("rightfunctor");
  f_phon = need_feature(h, "phon");
  f_morph = need_feature(h, "morph");
  f_mstring = need_feature(h, "mstring");
  f_stem = need_feature(h, "stem");
  f_mhead = need_feature(h, "mhead");
  if (t_mfunctor) {
    f_arg = need_feature(h, "arg");
    f_affix = need_feature(h, "affix");
  }
}

AnalysisOutput analyze_word(const Session& s, const std::u32string& surface,
                            const TraceFn& trace) {
  std::set<Char> ok = s.rules.alphabet.surface_chars();
  for (Char c : surface)
    if (!ok.count(c))
      throw LoadError("surface character '" + u32_to_utf8(c) +
                      "' is outside the alphabet");

  AnalysisOutput out;
  out.store = std::make_unique<Engine>(s.core);

  Engine work(s.core);
  if (trace) work.set_trace(trace);
  NodeId word = work.new_node(s.t_word);
  if (!work.put_string(word, {s.f_phon}, surface)) return out;
  auto morph = work.path_get(word, {s.f_morph});
  if (!morph) return out;

  std::set<std::string> warnings;
  auto emit = [&](NodeId w) {
    NodeId copy = out.store->copy_from(work, w);
    for (NodeId prev : out.words)
      if (out.store->iso(prev, copy)) return;
    out.words.push_back(copy);
  };

  EngineClient client(work, s, *morph, true);
  client.trace = trace;

  tl_analyze(s.rules, s.lexicon.trie(), surface, client, s.tl,
             [&](const Alignment& al) {
               Checkpoint cp = work.checkpoint();
               bool good = work.put_string(word, {s.f_morph, s.f_mstring}, al.lex) &&
                           tl_validate(s.rules, al, client);
               if (good) {
                 for (GoalId g : work.scheduled_relations()) work.resolve_scheduled(g);
                 for (GoalId g : work.pending_goals())
                   if (work.goal(g).kind != GoalKind::Constraint) {
                     good = false; // relational work left undone
                     break;
                   }
               }
               if (good) {
                 // lexeme enrichment, keyed by the outermost stem
                 std::optional<std::u32string> stem;
                 if (auto sn = work.peek_path(word, {s.f_morph, s.f_stem}))
                   stem = work.string_value(*sn);
                 const std::vector<LexemeEntry>* readings =
                     stem ? &s.lexicon.lexemes_for(*stem) : nullptr;
                 if (!readings || readings->empty()) {
                   warnings.insert(stem ? "no lexeme entry for stem \"" +
                                              u32_to_utf8(*stem) + "\""
                                        : "analysis without a ground stem");
                   emit(word);
                 } else {
                   for (const auto& r : *readings) {
                     Checkpoint cp2 = work.checkpoint();
                     NodeId lx = work.copy_from(s.templates, r.fs);
                     if (work.unify(word, lx)) emit(word);
                     work.undo_to(cp2);
                   }
                 }
               }
               work.undo_to(cp);
               return true;
             });

  out.warnings.assign(warnings.begin(), warnings.end());
  return out;
}

void apply_assignment(const Session& s, Engine& work, NodeId word,
                      const std::string& key, const std::string& value) {
  const TypeHierarchy& h = s.core->hierarchy;
  if (key == "stem") {
    if (!work.put_string(word, {s.f_morph, s.f_stem}, utf8_to_u32(value)))
      throw LoadError("assignment stem=" + value + " clashes with the grammar");
    return;
  }
  if (std::find(s.percolated.begin(), s.percolated.end(), key) == s.percolated.end())
    throw LoadError("unknown assignment key '" + key +
                    "' (expected stem or a percolated feature)");
  auto t = h.find_type(value);
  if (!t) t = h.find_type(key + "_" + value);
  if (!t) throw LoadError("unknown value '" + value + "' for feature '" + key + "'");
  FeaturePath p{s.f_morph, s.f_mhead, *h.find_feature(key)};
  if (!work.put_type(word, p, *t))
    throw LoadError("assignment " + key + "=" + value + " clashes with the grammar");
}

GenerationOutput generate_word(const Session& s, Engine& work, NodeId word,
                               const TraceFn& trace) {
  GenerationOutput out;
  auto morph = work.path_get(word, {s.f_morph});
  if (!morph) return out;

  std::set<std::u32string> surfaces;
  bool scheduled_any = false;

  std::vector<uint32_t> stems, functors;
  for (uint32_t i = 0; i < s.lexicon.morph_count(); ++i) {
    TypeId t = s.templates.type_of(s.lexicon.morph(i).fs);
    bool fun = s.t_mfunctor && s.core->hierarchy.subtype(t, *s.t_mfunctor);
    (fun ? functors : stems).push_back(i);
  }

  // candidate compositions: a stem wrapped in up to max_affixes functor layers
  std::function<void(NodeId, size_t)> layer = [&](NodeId cur, size_t depth) {
    {
      Checkpoint cp = work.checkpoint();
      if (work.unify(*morph, cur)) {
        auto sched = work.scheduled_relations();
        if (!sched.empty()) {
          scheduled_any = true;
          NodeId mstr = work.deref(work.goal(sched.front()).args[0]);
          if (auto lexs = work.string_value(mstr)) {
            if (trace) trace("candidate mstring \"" + u32_to_utf8(*lexs) + "\"");
            EngineClient client(work, s, *morph, false);
            client.trace = trace;
            tl_generate(s.rules, *lexs, client, s.tl, [&](const Alignment& al) {
              Checkpoint cp2 = work.checkpoint();
              if (work.put_string(word, {s.f_phon}, al.plain) &&
                  tl_validate(s.rules, al, client))
                surfaces.insert(al.plain);
              work.undo_to(cp2);
              return true;
            });
          }
        }
      }
      work.undo_to(cp);
    }
    if (depth >= s.max_affixes) return;
    for (uint32_t f : functors) {
      Checkpoint cp = work.checkpoint();
      NodeId fn = work.copy_from(s.templates, s.lexicon.morph(f).fs);
      auto slot = work.path_get(fn, {s.f_arg});
      if (slot && work.unify(*slot, cur)) layer(fn, depth + 1);
      work.undo_to(cp);
    }
  };

  for (uint32_t m : stems) {
    Checkpoint cp = work.checkpoint();
    layer(work.copy_from(s.templates, s.lexicon.morph(m).fs), 0);
    work.undo_to(cp);
  }

  out.delayed = !scheduled_any && surfaces.empty();
  out.surfaces.assign(surfaces.begin(), surfaces.end());
  return out;
}

GenerationOutput generate_word(const Session& s,
                               const std::vector<std::pair<std::string, std::string>>& assignments,
                               const TraceFn& trace) {
  Engine work(s.core);
  if (trace) work.set_trace(trace);
  NodeId word = work.new_node(s.t_word);
  for (const auto& [k, v] : assignments) apply_assignment(s, work, word, k, v);
  return generate_word(s, work, word, trace);
}

CheckReport check_session(const Session& s) {
  CheckReport rep;
  for (const auto& c : s.rules.conflicts) rep.errors.push_back("rule conflict: " + c);
  for (const auto& st : s.lexicon.unmatched_stems(s.templates))
    rep.errors.push_back("stem \"" + u32_to_utf8(st) + "\" has no lexeme entry");
  return rep;
}

NodeId compose_phrase(Engine& eng, NodeId head, const std::vector<NodeId>& comp_synsems) {
  const TypeHierarchy& h = eng.hierarchy();
  auto hp = h.find_type("headed_phrase");
  auto dtrs = h.find_feature("dtrs");
  auto head_dtr = h.find_feature("head_dtr");
  auto comp_dtrs = h.find_feature("comp_dtrs");
  if (!hp || !dtrs || !head_dtr || !comp_dtrs)
    throw LoadError("phrase composition needs headed_phrase with daughters");
  if (!eng.core().lists) throw LoadError("phrase composition needs list types");
  const ListTypes& lt = *eng.core().lists;

  Checkpoint cp = eng.checkpoint();
  NodeId p = eng.new_node(*hp);
  NodeId tail = eng.new_node(lt.elist);
  for (auto it = comp_synsems.rbegin(); it != comp_synsems.rend(); ++it) {
    NodeId cell = eng.new_node(lt.nelist);
    if (!eng.path_put(cell, {lt.first}, *it) || !eng.path_put(cell, {lt.rest}, tail)) {
      eng.undo_to(cp);
      return kNoNode;
    }
    tail = cell;
  }
  if (!eng.path_put(p, {*dtrs, *head_dtr}, head) ||
      !eng.path_put(p, {*dtrs, *comp_dtrs}, tail)) {
    eng.undo_to(cp);
    return kNoNode;
  }
  return p;
}

} // namespace morphounify
