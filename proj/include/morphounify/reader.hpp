/* text formats: grammar files, two-level rule files, morph and lexeme lexica */

#ifndef MORPHOUNIFY_READER_HPP
#define MORPHOUNIFY_READER_HPP

#include <string>
#include <vector>

#include "morphounify/constraints.hpp"
#include "morphounify/fs.hpp"
#include "morphounify/lexicon.hpp"
#include "morphounify/twolevel.hpp"

namespace morphounify {

// A parsed grammar file: the shared core (hierarchy, principled constraints,
// list machinery) plus the names of the percolated head features, which are
// also compiled into word-anchored sharing constraints.
struct GrammarFile {
  GrammarCore core;
  std::vector<std::string> percolated;
};

// Statements: `type name : parents [feat: vtype, ...].`, constraint
// definitions `name(X) := X ::= type, X::path === restr ==> body.` and
// `percolate feat.`  Comments run from `%` to end of line.
GrammarFile parse_grammar(const std::string& text);

struct RuleFile {
  Alphabet alphabet;
  std::vector<TwoLevelRule> rules;
};

// Declarations end with `;` (letters, null, morphboundary, wordboundary,
// set, pair), rules with `.`:  `LCON <=> LEX:SURF <=> RCON [:- filter(...)]`
// with => / <= variants, `_` for an absent context and wildcard items.
RuleFile parse_rule_file(const std::string& text, TypeHierarchy& hier);

// AVM concrete syntax shared by the lexica: `type [feat: value, ...]`,
// string literals "..", quoted atoms '..', #n coreference tags and
// <a, b, ...> list sugar.  Builds into eng and returns the root.
NodeId parse_avm(Engine& eng, const std::string& text);

// `morph "key" : AVM.` entries; keys must fit the lexical alphabet, entry
// structures must be margs or functors.  Margs get mstring = key, functors
// affix = key.
void load_morphs(Engine& eng, Lexicon& lex, const Alphabet& alphabet,
                 const std::string& text);

// `lexeme "stem" : AVM.` entries keyed by citation form.
void load_lexemes(Engine& eng, Lexicon& lex, const std::string& text);

std::string read_file(const std::string& path);

} // namespace morphounify

#endif
