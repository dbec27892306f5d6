/* morph lexicon: lexical trie, morph entries, lexeme (stem) entries */

#ifndef MORPHOUNIFY_LEXICON_HPP
#define MORPHOUNIFY_LEXICON_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morphounify/chars.hpp"
#include "morphounify/fs.hpp"

namespace morphounify {

// Character trie over lexical morph strings.  Continuation queries drive the
// lexical tape during analysis: only prefixes of stored morphs are explored.
class MorphTrie {
public:
  struct Node {
    std::map<Char, std::unique_ptr<Node>> children;
    std::vector<uint32_t> entries; // accepting iff non-empty
  };

  MorphTrie() : _root(new Node) {}

  void insert(const std::u32string& key, uint32_t entry_id);

  const Node* root() const { return _root.get(); }
  static const Node* step(const Node* n, Char c);

  // Exact continuation set of a prefix: the next characters of stored morphs,
  // plus whether the prefix itself is a complete morph.  nullopt if the
  // prefix leaves the trie.
  struct Continuations {
    std::set<Char> next;
    bool accepting = false;
  };
  std::optional<Continuations> continuations(std::u32string_view prefix) const;

  size_t size() const { return _count; }

private:
  std::unique_ptr<Node> _root;
  size_t _count = 0;
};

// One morph: lexical string plus its feature structure in the session's
// template store.  Margs are free stems; functors subcategorize for an
// adjacent msign (rightfunctor attaches to the msign on its left).
struct MorphEntry {
  std::u32string key;
  NodeId fs = kNoNode;
};

// One stem reading: synsem skeleton (subcategorization + content) unified
// into a word whose morphological stem matches.
struct LexemeEntry {
  std::u32string stem;
  NodeId fs = kNoNode;
};

class Lexicon {
public:
  // Registers the entry and indexes its key in the trie.
  uint32_t add_morph(MorphEntry entry);
  void add_lexeme(LexemeEntry entry);

  const MorphTrie& trie() const { return _trie; }
  const MorphEntry& morph(uint32_t id) const { return _morphs[id]; }
  size_t morph_count() const { return _morphs.size(); }
  const std::vector<uint32_t>& morphs_for(const std::u32string& key) const;

  const std::vector<LexemeEntry>& lexemes_for(const std::u32string& stem) const;
  size_t lexeme_count() const { return _lexeme_count; }

  // Stems referenced by morph entries but missing from the lexeme lexicon;
  // analysis of such stems succeeds with a warning.
  std::vector<std::u32string> unmatched_stems(const Engine& store) const;

private:
  MorphTrie _trie;
  std::vector<MorphEntry> _morphs;
  std::map<std::u32string, std::vector<uint32_t>> _bykey;
  std::map<std::u32string, std::vector<LexemeEntry>> _lexemes;
  size_t _lexeme_count = 0;
};

} // namespace morphounify

#endif
