/* brute-force declarative acceptor for two-level rule sets (test oracle) */

#ifndef MORPHOUNIFY_TEST_TL_ORACLE_HPP
#define MORPHOUNIFY_TEST_TL_ORACLE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "morphounify/chars.hpp"
#include "morphounify/twolevel.hpp"

// Independent acceptor: enumerates whole tapes by brute force and validates
// them against the declarative reading of the rules (no clause order, no
// commitment, no lookahead).  Filters are evaluated against a fixed table of
// feature values, the way a fully composed morphological sign would decide
// them.
namespace tl_oracle {

using morphounify::Char;
using morphounify::CompiledRuleSet;
using morphounify::CtxItem;
using morphounify::FilterCond;
using morphounify::TwoLevelRule;
using morphounify::TypeHierarchy;

using Tape = std::vector<std::pair<Char, Char>>;
// feature path (dot-joined names) -> value name
using Table = std::map<std::string, std::string>;

inline std::string cond_key(const TypeHierarchy& h, const FilterCond& c) {
  std::string k;
  for (size_t i = 0; i < c.path.size(); ++i) {
    if (i) k += ".";
    k += h.feature_name(c.path[i]);
  }
  return k;
}

inline std::string cond_val(const TypeHierarchy& h, const FilterCond& c) {
  return c.literal ? morphounify::u32_to_utf8(*c.literal) : h.type_name(c.type);
}

// Compatible = the table does not pin the path to a different value.
inline bool filter_ok(const TypeHierarchy& h, const std::vector<FilterCond>& conds,
                      const Table& tbl) {
  for (const auto& c : conds) {
    auto it = tbl.find(cond_key(h, c));
    if (it != tbl.end() && it->second != cond_val(h, c)) return false;
  }
  return true;
}

inline bool elem_ok(const CtxItem& e, Char l, Char s) {
  if (!e.lex.empty() && !e.lex.count(l)) return false;
  if (!e.surf.empty() && !e.surf.count(s)) return false;
  return true;
}

inline bool ctx_ok(const CompiledRuleSet& rs, const TwoLevelRule& r, const Tape& t,
                   size_t i) {
  const Char wb = rs.alphabet.word_boundary;
  for (size_t k = 0; k < r.lcon.size(); ++k) {
    long j = static_cast<long>(i) - 1 - static_cast<long>(k);
    Char l = wb, s = wb;
    if (j >= 0) {
      l = t[j].first;
      s = t[j].second;
    }
    if (!elem_ok(r.lcon[k], l, s)) return false;
  }
  for (size_t k = 0; k < r.rcon.size(); ++k) {
    size_t j = i + 1 + k;
    Char l = wb, s = wb;
    if (j < t.size()) {
      l = t[j].first;
      s = t[j].second;
    }
    if (!elem_ok(r.rcon[k], l, s)) return false;
  }
  return true;
}

inline bool tape_valid(const TypeHierarchy& h, const CompiledRuleSet& rs,
                       const Tape& t, const Table& tbl) {
  for (size_t i = 0; i < t.size(); ++i) {
    Char l = t[i].first, s = t[i].second;
    for (const auto& r : rs.rules) {
      // forcing half: matching context + compatible filter demands r.surf
      if (r.dir != morphounify::RuleDir::OnlyInContext && r.lex == l &&
          ctx_ok(rs, r, t, i) && filter_ok(h, r.filter, tbl) && s != r.surf)
        return false;
    }
    if (rs.restricted.count({l, s})) {
      bool licensed = false;
      for (const auto& r : rs.rules) {
        if (r.dir == morphounify::RuleDir::AlwaysInContext) continue;
        if (r.lex != l || r.surf != s) continue;
        if (!ctx_ok(rs, r, t, i)) continue;
        if (!filter_ok(h, r.filter, tbl)) continue;
        licensed = true;
        break;
      }
      if (!licensed) return false;
    }
  }
  return true;
}

namespace detail {

inline void surf_rec(const TypeHierarchy& h, const CompiledRuleSet& rs,
                     const std::u32string& lex, size_t i, Tape& tape, size_t lrun,
                     size_t srun, size_t max_run, const Table& tbl,
                     std::set<std::u32string>& out) {
  const Char nul = rs.alphabet.null_char;
  if (i == lex.size() && !tape.empty() && tape_valid(h, rs, tape, tbl)) {
    std::u32string plain;
    for (const auto& [l, s] : tape) {
      (void)l;
      if (s != nul) plain += s;
    }
    out.insert(plain);
  }
  auto push = [&](Char l, Char s, size_t ni, size_t nl, size_t ns) {
    tape.push_back({l, s});
    surf_rec(h, rs, lex, ni, tape, nl, ns, max_run, tbl, out);
    tape.pop_back();
  };
  if (i < lex.size()) {
    Char l = lex[i];
    if (rs.alphabet.feasible(l, nul) && srun < max_run) push(l, nul, i + 1, 0, srun + 1);
    for (Char s : rs.alphabet.surface_chars())
      if (rs.alphabet.feasible(l, s)) push(l, s, i + 1, 0, 0);
  }
  if (lrun < max_run)
    for (Char s : rs.alphabet.surface_chars())
      if (rs.alphabet.feasible(nul, s)) push(nul, s, i, lrun + 1, 0);
}

inline bool rel_rec(const TypeHierarchy& h, const CompiledRuleSet& rs,
                    const std::u32string& lex, const std::u32string& plain, size_t i,
                    size_t j, Tape& tape, size_t lrun, size_t srun, size_t max_run,
                    const Table& tbl) {
  const Char nul = rs.alphabet.null_char;
  if (i == lex.size() && j == plain.size() && !tape.empty() &&
      tape_valid(h, rs, tape, tbl))
    return true;
  auto push = [&](Char l, Char s, size_t ni, size_t nj, size_t nl, size_t ns) {
    tape.push_back({l, s});
    bool ok = rel_rec(h, rs, lex, plain, ni, nj, tape, nl, ns, max_run, tbl);
    tape.pop_back();
    return ok;
  };
  if (i < lex.size() && rs.alphabet.feasible(lex[i], nul) && srun < max_run)
    if (push(lex[i], nul, i + 1, j, 0, srun + 1)) return true;
  if (i < lex.size() && j < plain.size() && rs.alphabet.feasible(lex[i], plain[j]))
    if (push(lex[i], plain[j], i + 1, j + 1, 0, 0)) return true;
  if (j < plain.size() && rs.alphabet.feasible(nul, plain[j]) && lrun < max_run)
    if (push(nul, plain[j], i, j + 1, lrun + 1, 0)) return true;
  return false;
}

} // namespace detail

// Every surface realization of a lexical string.
inline std::set<std::u32string> surfaces(const TypeHierarchy& h,
                                         const CompiledRuleSet& rs,
                                         const std::u32string& lex, const Table& tbl,
                                         size_t max_null_run = 2) {
  std::set<std::u32string> out;
  Tape tape;
  detail::surf_rec(h, rs, lex, 0, tape, 0, 0, max_null_run, tbl, out);
  return out;
}

// Does any valid tape align lex with plain?
inline bool relates(const TypeHierarchy& h, const CompiledRuleSet& rs,
                    const std::u32string& lex, const std::u32string& plain,
                    const Table& tbl, size_t max_null_run = 2) {
  Tape tape;
  return detail::rel_rec(h, rs, lex, plain, 0, 0, tape, 0, 0, max_null_run, tbl);
}

} // namespace tl_oracle

#endif
