/* word grammar: session wiring, analysis, generation, phrase composition */

#ifndef MORPHOUNIFY_GRAMMAR_HPP
#define MORPHOUNIFY_GRAMMAR_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morphounify/fs.hpp"
#include "morphounify/lexicon.hpp"
#include "morphounify/reader.hpp"
#include "morphounify/twolevel.hpp"

namespace morphounify {

// A loaded grammar: the shared core, the compiled rule set and the lexicon
// entries held in a read-only template store.  Analysis and generation each
// run in their own working engine, so a session can serve concurrent calls.
struct Session {
  std::vector<std::string> percolated;
  CompiledRuleSet rules;
  std::shared_ptr<const GrammarCore> core; // initialized after rules (init order)
  Engine templates;
  Lexicon lexicon;
  TlConfig tl;
  size_t max_affixes = 3; // functor layers tried per generation candidate

  // resolved hierarchy handles the word grammar depends on
  TypeId t_word = 0, t_msign = 0;
  std::optional<TypeId> t_mfunctor, t_leftfunctor, t_rightfunctor;
  FeatId f_phon = 0, f_morph = 0, f_mstring = 0, f_stem = 0, f_mhead = 0;
  FeatId f_arg = 0, f_affix = 0; // resolved when functor types exist

  Session(const std::string& grammar_text, const std::string& rules_text,
          const std::string& morphs_text, const std::string& lexemes_text);
};

using TraceFn = std::function<void(const std::string&)>;

// Analyses of one surface word.  The store holds the result copies; words
// are deduplicated by mutual subsumption, in enumeration order.
struct AnalysisOutput {
  std::unique_ptr<Engine> store;
  std::vector<NodeId> words;
  std::vector<std::string> warnings;
};

// Enumerate every licensed word sign whose phon is `surface`.  Throws
// LoadError when the string leaves the surface alphabet.
AnalysisOutput analyze_word(const Session& s, const std::u32string& surface,
                            const TraceFn& trace = {});

// Surface realizations of a partially specified word.  When no composition
// candidate ever grounds morph|mstring, the morphology constraint stays
// delayed and `delayed` is set instead of reporting plain failure.
struct GenerationOutput {
  std::vector<std::u32string> surfaces; // sorted, deduplicated
  bool delayed = false;
  std::vector<std::string> warnings;
};

// Constrain `word` (a word-typed node in `work`) with one key=value
// assignment: "stem", or a percolated feature with a type-name value
// (plain, or prefixed as key_value).  Throws LoadError on unknown keys,
// unknown values, or a clash with the grammar.
void apply_assignment(const Session& s, Engine& work, NodeId word,
                      const std::string& key, const std::string& value);

// Generate from an existing partial word sign.
GenerationOutput generate_word(const Session& s, Engine& work, NodeId word,
                               const TraceFn& trace = {});

// Convenience form: fresh word, assignments applied, then generation.
GenerationOutput generate_word(const Session& s,
                               const std::vector<std::pair<std::string, std::string>>& assignments,
                               const TraceFn& trace = {});

// Static validation: forcing conflicts in the rule set and morph stems
// missing from the lexeme lexicon.  Load-time errors surface earlier, when
// the session is constructed.
struct CheckReport {
  std::vector<std::string> errors;
  bool clean() const { return errors.empty(); }
};

CheckReport check_session(const Session& s);

// Demonstration binary composition: wrap a head sign and its complement
// daughters' synsem values into a headed phrase; the principles fire as
// part of licensing.  Returns kNoNode when some principle fails.
NodeId compose_phrase(Engine& eng, NodeId head, const std::vector<NodeId>& comp_synsems);

} // namespace morphounify

#endif
