/* morph lexicon: lexical trie, morph entries, lexeme (stem) entries */

#include "morphounify/lexicon.hpp"

#include <algorithm>

#include "morphounify/errors.hpp"

namespace morphounify {

void MorphTrie::insert(const std::u32string& key, uint32_t entry_id) {
  if (key.empty()) throw LoadError("empty morph key");
  Node* n = _root.get();
  for (Char c : key) {
    auto& slot = n->children[c];
    if (!slot) slot.reset(new Node);
    n = slot.get();
  }
  n->entries.push_back(entry_id);
  ++_count;
}

const MorphTrie::Node* MorphTrie::step(const Node* n, Char c) {
  auto it = n->children.find(c);
  return it == n->children.end() ? nullptr : it->second.get();
}

std::optional<MorphTrie::Continuations> MorphTrie::continuations(
    std::u32string_view prefix) const {
  const Node* n = _root.get();
  for (Char c : prefix) {
    n = step(n, c);
    if (!n) return std::nullopt;
  }
  Continuations out;
  out.accepting = !n->entries.empty();
  for (const auto& [c, child] : n->children) {
    (void)child;
    out.next.insert(c);
  }
  return out;
}

uint32_t Lexicon::add_morph(MorphEntry entry) {
  uint32_t id = static_cast<uint32_t>(_morphs.size());
  _trie.insert(entry.key, id);
  _bykey[entry.key].push_back(id);
  _morphs.push_back(std::move(entry));
  return id;
}

void Lexicon::add_lexeme(LexemeEntry entry) {
  _lexemes[entry.stem].push_back(std::move(entry));
  ++_lexeme_count;
}

const std::vector<uint32_t>& Lexicon::morphs_for(const std::u32string& key) const {
  static const std::vector<uint32_t> none;
  auto it = _bykey.find(key);
  return it == _bykey.end() ? none : it->second;
}

const std::vector<LexemeEntry>& Lexicon::lexemes_for(const std::u32string& stem) const {
  static const std::vector<LexemeEntry> none;
  auto it = _lexemes.find(stem);
  return it == _lexemes.end() ? none : it->second;
}

std::vector<std::u32string> Lexicon::unmatched_stems(const Engine& store) const {
  std::vector<std::u32string> out;
  auto stem_feat = store.hierarchy().find_feature("stem");
  if (!stem_feat) return out;
  for (const auto& m : _morphs) {
    auto sn = store.peek_path(m.fs, {*stem_feat});
    if (!sn) continue;
    auto sv = store.string_value(*sn);
    if (!sv) continue;
    if (_lexemes.find(*sv) == _lexemes.end() &&
        std::find(out.begin(), out.end(), *sv) == out.end())
      out.push_back(*sv);
  }
  return out;
}

} // namespace morphounify
