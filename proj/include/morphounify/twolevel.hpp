/* extended two-level rules: alphabet, rule compilation, alignment search */

#ifndef MORPHOUNIFY_TWOLEVEL_HPP
#define MORPHOUNIFY_TWOLEVEL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morphounify/chars.hpp"
#include "morphounify/constraints.hpp"
#include "morphounify/lexicon.hpp"
#include "morphounify/types.hpp"

namespace morphounify {

// Character inventory of the two-level layer.  Plain letters are feasible as
// identity pairs; every other lexical:surface correspondence must be declared.
// The null character marks deletions/insertions and is never part of a plain
// surface string; the word boundary only ever appears as a context sentinel.
struct Alphabet {
  std::set<Char> letters;
  Char null_char = U'0';
  Char morph_boundary = U'+';
  Char word_boundary = U'$';
  std::map<std::string, std::set<Char>> sets;
  std::set<std::pair<Char, Char>> pairs; // declared non-identity pairs

  bool feasible(Char l, Char s) const {
    if (l == s && letters.count(l)) return true;
    return pairs.count({l, s}) != 0;
  }
  std::set<Char> lexical_chars() const;
  std::set<Char> surface_chars() const;
};

// <=> restricts its pair to the context and forces the surfacing there;
// => only restricts; <= only forces.
enum class RuleDir : uint8_t { Both, OnlyInContext, AlwaysInContext };

// One context element, matching a single tape pair.  An empty side is a
// wildcard; a wildcard element also matches the word-boundary sentinel.
struct CtxItem {
  std::set<Char> lex;
  std::set<Char> surf;

  bool matches(Char l, Char s) const {
    return (lex.empty() || lex.count(l)) && (surf.empty() || surf.count(s));
  }
  bool overlaps(const CtxItem& o) const;
};

// One filter condition: a path into the word's morphological sign together
// with the value (a type, or a string literal) it must carry.
struct FilterCond {
  FeaturePath path;
  TypeId type = 0;
  std::optional<std::u32string> literal;
};

struct TwoLevelRule {
  RuleDir dir = RuleDir::Both;
  Char lex = 0, surf = 0;        // the transition pair
  std::vector<CtxItem> lcon;     // left context, innermost pair first
  std::vector<CtxItem> rcon;     // right context, outward order
  std::vector<FilterCond> filter;
  uint32_t file_index = 0;
  std::string label;             // for diagnostics
};

// Rules in clause order: more specific (longer context) first, then file
// order; pairs not mentioned by any rule fall through to the implicit
// default clause, which admits every feasible pair.
struct CompiledRuleSet {
  Alphabet alphabet;
  std::vector<TwoLevelRule> rules;
  std::set<std::pair<Char, Char>> restricted; // transition pairs of <=> / => rules
  size_t max_rcon = 0;
  std::vector<std::string> conflicts; // <=> vs <=>/<= disagreements found at compile time

  std::map<Char, std::vector<Char>> surf_options; // per lexical char, sorted
};

// Validates rules against the alphabet, orders clauses, indexes feasible
// surfacings and reports forcing conflicts.  Throws LoadError on infeasible
// transition pairs or malformed contexts.
CompiledRuleSet compile_rules(Alphabet alphabet, std::vector<TwoLevelRule> rules,
                              const TypeHierarchy& hier);

// Bridge to the morphological sign under construction.  assert_filter
// unifies the conditions into the sign (all or nothing) and reports failure;
// filter_compatible tests the same without leaving any trace.  mark/undo_to
// bracket search branches so all effects backtrack with them.
//
// During analysis the search also drives composition: whenever a morph is
// completed it is committed through select_morph (branching over the
// homograph alternatives announced by morph_alternatives), so that filters
// evaluated afterwards see the entry's feature values; finish_word closes
// the composition when the word ends.  Generation and checking never call
// the composition hooks -- there the caller owns the already-composed sign.
struct SignClient {
  virtual bool assert_filter(const std::vector<FilterCond>& conds) = 0;
  virtual bool filter_compatible(const std::vector<FilterCond>& conds) = 0;
  virtual uint64_t mark() = 0;
  virtual void undo_to(uint64_t m) = 0;

  virtual size_t morph_alternatives(const std::u32string& morph) {
    (void)morph;
    return 1;
  }
  virtual bool select_morph(const std::u32string& morph, size_t alt) {
    (void)morph;
    (void)alt;
    return true;
  }
  virtual bool finish_word() { return true; }
  virtual ~SignClient() = default;
};

// Client with no sign: every filter is vacuously compatible.
struct NullSignClient final : SignClient {
  bool assert_filter(const std::vector<FilterCond>&) override { return true; }
  bool filter_compatible(const std::vector<FilterCond>&) override { return true; }
  uint64_t mark() override { return 0; }
  void undo_to(uint64_t) override {}
};

struct TlConfig {
  size_t max_null_run = 2;   // longest run of nulls on either tape
  bool lookahead = true;     // prune with the right-context window during search
  size_t max_steps = 2000000;
};

// One complete tape alignment.  ltape/stape include nulls and are equally
// long; lex/plain are the tapes with nulls removed.
struct Alignment {
  std::u32string ltape, stape;
  std::u32string lex, plain;
  std::vector<std::u32string> morphs; // trie segmentation (analysis only)
};

// Enumeration callback; return false to stop early.  It runs while the
// branch's filter assertions are still applied; they are undone afterwards.
using AlignmentFn = std::function<bool(const Alignment&)>;

// Analysis: enumerate alignments whose plain surface equals `surface`, with
// the lexical tape restricted to concatenations of trie morphs.
void tl_analyze(const CompiledRuleSet& rs, const MorphTrie& trie,
                const std::u32string& surface, SignClient& client,
                const TlConfig& cfg, const AlignmentFn& fn);

// Generation: enumerate alignments whose lexical side equals `lex`.
void tl_generate(const CompiledRuleSet& rs, const std::u32string& lex,
                 SignClient& client, const TlConfig& cfg, const AlignmentFn& fn);

// Checking: does some alignment relate `lex` to `surface`?
bool tl_check(const CompiledRuleSet& rs, const std::u32string& lex,
              const std::u32string& surface, SignClient& client,
              const TlConfig& cfg);

// Declarative post-hoc sweep over a complete alignment, evaluated against the
// (by now fully composed) morphological sign: every restricted pair must be
// licensed by a fully matching rule, and every forcing rule whose context
// matches and whose filter is still compatible must be obeyed.
bool tl_validate(const CompiledRuleSet& rs, const Alignment& al, SignClient& client);

} // namespace morphounify

#endif
