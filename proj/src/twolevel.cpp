/* extended two-level rules: alphabet, rule compilation, alignment search */

#include "morphounify/twolevel.hpp"

#include <algorithm>

#include "morphounify/errors.hpp"

namespace morphounify {

namespace {

bool side_overlaps(const std::set<Char>& a, const std::set<Char>& b) {
  if (a.empty() || b.empty()) return true;
  for (Char c : a)
    if (b.count(c)) return true;
  return false;
}

bool contexts_overlap(const std::vector<CtxItem>& a, const std::vector<CtxItem>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i)
    if (!a[i].overlaps(b[i])) return false;
  return true;
}

// Two filters can hold of the same sign unless they pin the same path to
// incompatible values.
bool filters_coexist(const TwoLevelRule& a, const TwoLevelRule& b,
                     const TypeHierarchy& hier) {
  for (const auto& ca : a.filter)
    for (const auto& cb : b.filter) {
      if (ca.path != cb.path) continue;
      if (ca.literal && cb.literal) {
        if (*ca.literal != *cb.literal) return false;
        continue;
      }
      if (ca.literal || cb.literal) continue;
      if (hier.glb(ca.type, cb.type).state == GlbResult::None) return false;
    }
  return true;
}

std::string pair_label(Char l, Char s) {
  return u32_to_utf8(l) + ":" + u32_to_utf8(s);
}

void check_context_chars(const TwoLevelRule& r, const Alphabet& A,
                         const std::set<Char>& lex_ok, const std::set<Char>& surf_ok) {
  auto bad = [&](const std::vector<CtxItem>& con) -> std::optional<Char> {
    for (const auto& item : con) {
      for (Char c : item.lex)
        if (!lex_ok.count(c) && c != A.null_char && c != A.word_boundary) return c;
      for (Char c : item.surf)
        if (!surf_ok.count(c) && c != A.null_char && c != A.word_boundary) return c;
    }
    return std::nullopt;
  };
  for (const auto* con : {&r.lcon, &r.rcon})
    if (auto c = bad(*con))
      throw LoadError("rule " + r.label + ": context character '" + u32_to_utf8(*c) +
                      "' is not in the alphabet");
}

// Context element at offset k, with word-boundary sentinels outside the tape.
bool ctx_match(const Alphabet& A, const std::vector<CtxItem>& con,
               const std::u32string& lt, const std::u32string& st, size_t i,
               bool left) {
  for (size_t k = 0; k < con.size(); ++k) {
    long j = left ? static_cast<long>(i) - 1 - static_cast<long>(k)
                  : static_cast<long>(i) + 1 + static_cast<long>(k);
    Char l = A.word_boundary, s = A.word_boundary;
    if (j >= 0 && j < static_cast<long>(lt.size())) {
      l = lt[j];
      s = st[j];
    }
    if (!con[k].matches(l, s)) return false;
  }
  return true;
}

enum class Mode { Analysis, Generation, Checking };

struct Search {
  const CompiledRuleSet& rs;
  const MorphTrie* trie;
  SignClient& client;
  const TlConfig& cfg;
  Mode mode;
  const AlignmentFn& fn;

  std::u32string plain; // analysis/checking input
  std::u32string lex;   // generation/checking input
  size_t ppos = 0, lpos = 0;

  std::u32string ltape, stape;
  const MorphTrie::Node* tnode = nullptr;
  std::u32string cur_morph;
  std::vector<std::u32string> morphs;
  size_t lex_null_run = 0, surf_null_run = 0;
  size_t steps = 0;
  bool stopped = false;

  Search(const CompiledRuleSet& rs_, const MorphTrie* trie_, SignClient& client_,
         const TlConfig& cfg_, Mode mode_, const AlignmentFn& fn_)
      : rs(rs_), trie(trie_), client(client_), cfg(cfg_), mode(mode_), fn(fn_) {}

  // Clause scan at position i: the first rule whose trigger, contexts and
  // filter apply handles the pair (committing the filter's conditions);
  // unmentioned pairs fall through to the implicit default clause.  Callers
  // only check a position once its whole right-context window is on the tape
  // (or the word is finished), so sentinel padding is always conclusive.
  bool check_position(size_t i) {
    Char l = ltape[i], s = stape[i];
    for (const auto& r : rs.rules) {
      bool forcing = r.dir != RuleDir::OnlyInContext && r.lex == l;
      bool licensing = r.dir != RuleDir::AlwaysInContext && r.lex == l && r.surf == s;
      if (!forcing && !licensing) continue;
      if (!ctx_match(rs.alphabet, r.lcon, ltape, stape, i, true)) continue;
      if (!ctx_match(rs.alphabet, r.rcon, ltape, stape, i, false)) continue;
      if (!client.assert_filter(r.filter)) continue; // filter refuted: clause skipped
      return !forcing || s == r.surf;
    }
    return rs.restricted.count({l, s}) == 0;
  }

  // Cheap sound prune: a restricted pair whose every candidate rule already
  // fails on the (fully known) left context can never be licensed later.
  bool quick_license(size_t i) const {
    Char l = ltape[i], s = stape[i];
    if (!rs.restricted.count({l, s})) return true;
    for (const auto& r : rs.rules) {
      if (r.dir == RuleDir::AlwaysInContext || r.lex != l || r.surf != s) continue;
      if (ctx_match(rs.alphabet, r.lcon, ltape, stape, i, true)) return true;
    }
    return false;
  }

  void try_finish() {
    if (mode == Mode::Analysis) {
      if (ppos != plain.size() || !tnode || tnode->entries.empty() || cur_morph.empty())
        return;
      // commit the final morph before the closing checks so they see its entry
      size_t alts = client.morph_alternatives(cur_morph);
      for (size_t a = 0; a < alts && !stopped; ++a) {
        uint64_t m = client.mark();
        if (client.select_morph(cur_morph, a) && client.finish_word()) finish_checks();
        client.undo_to(m);
      }
      return;
    }
    if (mode == Mode::Generation) {
      if (lpos != lex.size() || ltape.empty()) return;
    } else {
      if (ppos != plain.size() || lpos != lex.size() || ltape.empty()) return;
    }
    uint64_t m = client.mark();
    finish_checks();
    client.undo_to(m);
  }

  // Remaining window checks at the word end, then hand the alignment out.
  void finish_checks() {
    bool ok = true;
    size_t n = ltape.size();
    size_t from = cfg.lookahead ? (n > rs.max_rcon ? n - rs.max_rcon : 0) : 0;
    for (size_t i = from; ok && i < n; ++i) ok = check_position(i);
    if (!ok) return;
    Alignment al;
    al.ltape = ltape;
    al.stape = stape;
    for (Char c : ltape)
      if (c != rs.alphabet.null_char) al.lex += c;
    for (Char c : stape)
      if (c != rs.alphabet.null_char) al.plain += c;
    if (mode == Mode::Analysis) {
      al.morphs = morphs;
      al.morphs.push_back(cur_morph);
    }
    if (!fn(al)) stopped = true;
  }

  void try_pair(Char l, Char s, bool new_morph) {
    if (stopped) return;
    const Char nul = rs.alphabet.null_char;
    bool lnull = l == nul, snull = s == nul;
    if (lnull && snull) return;
    if (lnull && lex_null_run >= cfg.max_null_run) return;
    if (snull && surf_null_run >= cfg.max_null_run) return;
    if (mode != Mode::Generation && !snull &&
        (ppos >= plain.size() || plain[ppos] != s))
      return;
    if (mode != Mode::Analysis && !lnull && (lpos >= lex.size() || lex[lpos] != l))
      return;

    const MorphTrie::Node* saved_tnode = tnode;
    std::u32string saved_morph = cur_morph;
    size_t saved_morphs = morphs.size();
    size_t saved_lnr = lex_null_run, saved_snr = surf_null_run;

    if (mode == Mode::Analysis && !lnull) {
      const MorphTrie::Node* base = tnode;
      if (new_morph) base = trie->root();
      const MorphTrie::Node* next = MorphTrie::step(base, l);
      if (!next) return;
      if (new_morph) {
        morphs.push_back(cur_morph);
        cur_morph.clear();
      }
      tnode = next;
      cur_morph.push_back(l);
    }
    uint64_t m = client.mark();
    ltape.push_back(l);
    stape.push_back(s);
    lex_null_run = lnull ? lex_null_run + 1 : 0;
    surf_null_run = snull ? surf_null_run + 1 : 0;
    if (!snull && mode != Mode::Generation) ++ppos;
    if (!lnull && mode != Mode::Analysis) ++lpos;

    bool ok = true;
    if (cfg.lookahead) {
      ok = quick_license(ltape.size() - 1);
      if (ok && ltape.size() > rs.max_rcon)
        ok = check_position(ltape.size() - 1 - rs.max_rcon);
    }
    if (ok) dfs();

    client.undo_to(m);
    ltape.pop_back();
    stape.pop_back();
    if (!snull && mode != Mode::Generation) --ppos;
    if (!lnull && mode != Mode::Analysis) --lpos;
    lex_null_run = saved_lnr;
    surf_null_run = saved_snr;
    tnode = saved_tnode;
    cur_morph = std::move(saved_morph);
    morphs.resize(saved_morphs);
  }

  void surface_candidates(Char l, bool new_morph) {
    auto it = rs.surf_options.find(l);
    if (it == rs.surf_options.end()) return;
    for (Char s : it->second) {
      try_pair(l, s, new_morph);
      if (stopped) return;
    }
  }

  void dfs() {
    if (stopped) return;
    if (++steps > cfg.max_steps)
      throw EngineError("two-level alignment search exceeded its step budget");
    try_finish();
    if (stopped) return;

    if (mode == Mode::Analysis) {
      for (const auto& [c, child] : tnode->children) {
        (void)child;
        surface_candidates(c, false);
        if (stopped) return;
      }
      if (!tnode->entries.empty()) {
        // a morph can close here: commit one of its entries, then continue
        // into a fresh morph so later filters see the entry's values
        size_t alts = client.morph_alternatives(cur_morph);
        for (size_t a = 0; a < alts && !stopped; ++a) {
          uint64_t m = client.mark();
          if (client.select_morph(cur_morph, a))
            for (const auto& [c, child] : trie->root()->children) {
              (void)child;
              surface_candidates(c, true);
              if (stopped) break;
            }
          client.undo_to(m);
        }
        if (stopped) return;
      }
    } else if (lpos < lex.size()) {
      surface_candidates(lex[lpos], false);
      if (stopped) return;
    }
    // lexical-null insertions consume surface without advancing the lexicon
    auto it = rs.surf_options.find(rs.alphabet.null_char);
    if (it != rs.surf_options.end())
      for (Char s : it->second) {
        try_pair(rs.alphabet.null_char, s, false);
        if (stopped) return;
      }
  }
};

} // namespace

std::set<Char> Alphabet::lexical_chars() const {
  std::set<Char> out = letters;
  for (const auto& [l, s] : pairs) {
    (void)s;
    out.insert(l);
  }
  out.erase(null_char);
  return out;
}

std::set<Char> Alphabet::surface_chars() const {
  std::set<Char> out = letters;
  for (const auto& [l, s] : pairs) {
    (void)l;
    out.insert(s);
  }
  out.erase(null_char);
  return out;
}

bool CtxItem::overlaps(const CtxItem& o) const {
  return side_overlaps(lex, o.lex) && side_overlaps(surf, o.surf);
}

CompiledRuleSet compile_rules(Alphabet alphabet, std::vector<TwoLevelRule> rules,
                              const TypeHierarchy& hier) {
  CompiledRuleSet rs;
  rs.alphabet = std::move(alphabet);
  const Alphabet& A = rs.alphabet;
  if (A.letters.count(A.null_char))
    throw LoadError("null character may not be a plain letter");

  std::set<Char> lex_ok = A.lexical_chars(), surf_ok = A.surface_chars();
  for (size_t i = 0; i < rules.size(); ++i) {
    auto& r = rules[i];
    r.file_index = static_cast<uint32_t>(i);
    if (r.label.empty()) r.label = pair_label(r.lex, r.surf);
    if (!A.feasible(r.lex, r.surf))
      throw LoadError("rule " + r.label + ": transition pair " +
                      pair_label(r.lex, r.surf) + " is not feasible");
    check_context_chars(r, A, lex_ok, surf_ok);
  }

  rs.rules = std::move(rules);
  std::stable_sort(rs.rules.begin(), rs.rules.end(),
                   [](const TwoLevelRule& a, const TwoLevelRule& b) {
                     return a.lcon.size() + a.rcon.size() >
                            b.lcon.size() + b.rcon.size();
                   });
  for (const auto& r : rs.rules) {
    if (r.dir != RuleDir::AlwaysInContext) rs.restricted.insert({r.lex, r.surf});
    rs.max_rcon = std::max(rs.max_rcon, r.rcon.size());
  }

  for (Char c : A.letters) rs.surf_options[c].push_back(c);
  for (const auto& [l, s] : A.pairs) rs.surf_options[l].push_back(s);
  for (auto& [l, opts] : rs.surf_options) {
    (void)l;
    std::sort(opts.begin(), opts.end());
    opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
  }

  // Forcing rules that could demand different surfacings of the same lexical
  // character in overlapping contexts, with filters that can hold together.
  for (size_t i = 0; i < rs.rules.size(); ++i)
    for (size_t j = i + 1; j < rs.rules.size(); ++j) {
      const auto& a = rs.rules[i];
      const auto& b = rs.rules[j];
      if (a.dir == RuleDir::OnlyInContext || b.dir == RuleDir::OnlyInContext) continue;
      if (a.lex != b.lex || a.surf == b.surf) continue;
      if (!contexts_overlap(a.lcon, b.lcon) || !contexts_overlap(a.rcon, b.rcon))
        continue;
      if (!filters_coexist(a, b, hier)) continue;
      rs.conflicts.push_back("rules " + a.label + " and " + b.label +
                             " force different surfacings of '" +
                             u32_to_utf8(a.lex) + "' in overlapping contexts");
    }
  return rs;
}

void tl_analyze(const CompiledRuleSet& rs, const MorphTrie& trie,
                const std::u32string& surface, SignClient& client,
                const TlConfig& cfg, const AlignmentFn& fn) {
  Search s(rs, &trie, client, cfg, Mode::Analysis, fn);
  s.plain = surface;
  s.tnode = trie.root();
  s.dfs();
}

void tl_generate(const CompiledRuleSet& rs, const std::u32string& lex,
                 SignClient& client, const TlConfig& cfg, const AlignmentFn& fn) {
  Search s(rs, nullptr, client, cfg, Mode::Generation, fn);
  s.lex = lex;
  s.dfs();
}

bool tl_check(const CompiledRuleSet& rs, const std::u32string& lex,
              const std::u32string& surface, SignClient& client,
              const TlConfig& cfg) {
  bool ok = false;
  AlignmentFn fn = [&](const Alignment& al) {
    if (tl_validate(rs, al, client)) {
      ok = true;
      return false;
    }
    return true;
  };
  Search s(rs, nullptr, client, cfg, Mode::Checking, fn);
  s.plain = surface;
  s.lex = lex;
  s.dfs();
  return ok;
}

bool tl_validate(const CompiledRuleSet& rs, const Alignment& al, SignClient& client) {
  const auto& lt = al.ltape;
  const auto& st = al.stape;
  for (size_t i = 0; i < lt.size(); ++i) {
    Char l = lt[i], s = st[i];
    for (const auto& r : rs.rules) {
      if (r.dir == RuleDir::OnlyInContext || r.lex != l) continue;
      if (!ctx_match(rs.alphabet, r.lcon, lt, st, i, true)) continue;
      if (!ctx_match(rs.alphabet, r.rcon, lt, st, i, false)) continue;
      if (!client.filter_compatible(r.filter)) continue;
      if (s != r.surf) return false;
    }
    if (rs.restricted.count({l, s})) {
      bool licensed = false;
      for (const auto& r : rs.rules) {
        if (r.dir == RuleDir::AlwaysInContext || r.lex != l || r.surf != s) continue;
        if (!ctx_match(rs.alphabet, r.lcon, lt, st, i, true)) continue;
        if (!ctx_match(rs.alphabet, r.rcon, lt, st, i, false)) continue;
        if (!client.filter_compatible(r.filter)) continue;
        licensed = true;
        break;
      }
      if (!licensed) return false;
    }
  }
  return true;
}

} // namespace morphounify
