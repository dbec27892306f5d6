/* recursive-descent readers for the grammar, rule and lexicon text formats */

#include "morphounify/reader.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "morphounify/chars.hpp"
#include "morphounify/errors.hpp"

namespace morphounify {

namespace {

struct Token {
  enum Kind : uint8_t { End, Ident, Str, Atom, Tag, Punct } kind = End;
  std::string text; // UTF-8; quotes stripped for Str/Atom, digits for Tag
  int line = 1;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

std::vector<Token> tokenize(const std::string& text) {
  static const char* multi[] = {"::=", "===", "==>", "<=>", "::",
                                ":=",  ":-",  "=>",  "<="};
  std::vector<Token> out;
  int line = 1;
  size_t i = 0, n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '%') { // comment to end of line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.line = line;
    if (c == '"' || c == '\'') {
      size_t j = i + 1;
      while (j < n && text[j] != c && text[j] != '\n') ++j;
      if (j >= n || text[j] != c)
        throw LoadError("line " + std::to_string(line) + ": unterminated quote");
      t.kind = c == '"' ? Token::Str : Token::Atom;
      t.text = text.substr(i + 1, j - i - 1);
      out.push_back(std::move(t));
      i = j + 1;
      continue;
    }
    if (c == '#') {
      size_t j = i + 1;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i + 1)
        throw LoadError("line " + std::to_string(line) + ": '#' needs a tag number");
      t.kind = Token::Tag;
      t.text = text.substr(i + 1, j - i - 1);
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    bool matched = false;
    for (const char* m : multi) {
      size_t len = std::strlen(m);
      if (text.compare(i, len, m) == 0) {
        t.kind = Token::Punct;
        t.text = m;
        out.push_back(std::move(t));
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (ident_char(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < n && ident_char(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Token::Ident;
      t.text = text.substr(i, j - i);
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    t.kind = Token::Punct;
    t.text.assign(1, c);
    out.push_back(std::move(t));
    ++i;
  }
  Token end;
  end.line = line;
  out.push_back(std::move(end));
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  explicit Parser(const std::string& text) : toks(tokenize(text)) {}

  const Token& peek(size_t k = 0) const {
    return toks[std::min(pos + k, toks.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks[pos];
    if (t.kind != Token::End) ++pos;
    return t;
  }
  bool done() const { return peek().kind == Token::End; }
  bool at_punct(const char* p) const {
    return peek().kind == Token::Punct && peek().text == p;
  }
  bool accept_punct(const char* p) {
    if (!at_punct(p)) return false;
    ++pos;
    return true;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Ident) fail(std::string("expected ") + what);
    return next().text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string where = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
    throw LoadError("line " + std::to_string(t.line) + ": " + msg + " at " + where);
  }
};

// ---------------------------------------------------------------------------
// grammar files

struct GrammarParser : Parser {
  GrammarFile out;

  using Parser::Parser;

  TypeId require_type(const std::string& n) {
    if (auto t = out.core.hierarchy.find_type(n)) return *t;
    fail("unknown type '" + n + "'");
  }
  std::string type_name_token() {
    if (peek().kind == Token::Ident || peek().kind == Token::Atom) return next().text;
    fail("expected a type name");
  }
  FeaturePath parse_path() {
    FeaturePath p;
    p.push_back(out.core.hierarchy.intern_feature(expect_ident("a feature name")));
    while (accept_punct(":"))
      p.push_back(out.core.hierarchy.intern_feature(expect_ident("a feature name")));
    return p;
  }

  void parse_type() {
    int stmt_line = peek().line;
    std::string name = type_name_token();
    expect_punct(":");
    std::vector<std::string> parents{type_name_token()};
    while (!at_punct("[") && !at_punct(".")) {
      accept_punct(",");
      parents.push_back(type_name_token());
    }
    std::vector<std::pair<std::string, std::string>> feats;
    if (accept_punct("[")) {
      if (!at_punct("]")) do {
          std::string f = expect_ident("a feature name");
          expect_punct(":");
          feats.emplace_back(f, type_name_token());
        } while (accept_punct(","));
      expect_punct("]");
    }
    expect_punct(".");
    try {
      out.core.hierarchy.declare(name, parents, feats);
    } catch (const LoadError& e) {
      throw LoadError("line " + std::to_string(stmt_line) + ": " + e.what());
    }
  }

  void parse_percolate() {
    do {
      out.percolated.push_back(expect_ident("a feature name"));
    } while (accept_punct(","));
    expect_punct(".");
  }

  ConsTerm parse_term(const std::string& param, std::map<std::string, uint32_t>& vars) {
    if (peek().kind == Token::Str) return ConsTerm::make_str(utf8_to_u32(next().text));
    if (peek().kind == Token::Atom) return ConsTerm::make_type(require_type(next().text));
    std::string id = expect_ident("a term");
    if (id == param) {
      FeaturePath p;
      if (accept_punct("::")) p = parse_path();
      return ConsTerm::make_path(std::move(p));
    }
    if (auto t = out.core.hierarchy.find_type(id)) return ConsTerm::make_type(*t);
    if (std::isupper(static_cast<unsigned char>(id[0]))) {
      auto [it, fresh] = vars.emplace(id, static_cast<uint32_t>(vars.size()));
      (void)fresh;
      return ConsTerm::make_var(it->second);
    }
    fail("unknown type or variable '" + id + "'");
  }

  void parse_body_item(ConditionalConstraint& c, const std::string& param,
                       std::map<std::string, uint32_t>& vars) {
    if (peek().kind == Token::Ident && peek(1).kind == Token::Punct &&
        peek(1).text == "(") {
      std::string rel = next().text;
      RelCall call;
      if (rel == "fs_append")
        call.rel = BuiltinRel::FsAppend;
      else if (rel == "concat")
        call.rel = BuiltinRel::Concat;
      else if (rel == "morphology")
        call.rel = BuiltinRel::Morphology;
      else
        fail("unknown relation '" + rel + "'");
      expect_punct("(");
      do {
        call.args.push_back(parse_term(param, vars));
      } while (accept_punct(","));
      expect_punct(")");
      if (call.args.size() != 3) fail(rel + " takes exactly three arguments");
      c.relations.push_back(std::move(call));
      return;
    }
    Equation eq;
    eq.lhs = parse_term(param, vars);
    expect_punct("===");
    eq.rhs = parse_term(param, vars);
    c.equations.push_back(std::move(eq));
  }

  void parse_constraint(std::string name) {
    ConditionalConstraint c;
    c.name = std::move(name);
    expect_punct("(");
    std::string param = expect_ident("a variable");
    expect_punct(")");
    expect_punct(":=");
    do {
      std::string v = expect_ident("a variable");
      if (v != param) fail("unknown variable '" + v + "'");
      if (accept_punct("::=")) {
        c.anchor = require_type(type_name_token());
        continue;
      }
      expect_punct("::");
      AntecedentReq r;
      r.path = parse_path();
      expect_punct("===");
      if (peek().kind == Token::Ident && peek().text == "subtype_of") {
        next();
        expect_punct("(");
        r.type = require_type(type_name_token());
        expect_punct(")");
        r.mode = ReqMode::ProperSubtype;
      } else {
        r.type = require_type(type_name_token());
      }
      c.reqs.push_back(std::move(r));
    } while (accept_punct(","));
    expect_punct("==>");
    std::map<std::string, uint32_t> vars;
    do {
      parse_body_item(c, param, vars);
    } while (accept_punct(","));
    expect_punct(".");
    c.var_count = static_cast<uint32_t>(vars.size());
    c.id = static_cast<uint32_t>(out.core.constraints.items.size());
    out.core.constraints.items.push_back(std::move(c));
  }

  // percolated features become sharing constraints anchored on word
  void synthesize_percolation() {
    if (out.percolated.empty()) return;
    auto& h = out.core.hierarchy;
    auto word = h.find_type("word");
    if (!word) throw LoadError("percolate declarations need a declared word type");
    for (const auto& f : out.percolated) {
      ConditionalConstraint c;
      c.name = "percolate_" + f;
      c.anchor = *word;
      Equation eq;
      eq.lhs = ConsTerm::make_path(
          {h.intern_feature("morph"), h.intern_feature("mhead"), h.intern_feature(f)});
      eq.rhs = ConsTerm::make_path(
          {h.intern_feature("synsem"), h.intern_feature("loc"), h.intern_feature("cat"),
           h.intern_feature("head"), h.intern_feature(f)});
      c.equations.push_back(std::move(eq));
      c.id = static_cast<uint32_t>(out.core.constraints.items.size());
      out.core.constraints.items.push_back(std::move(c));
    }
  }

  void run() {
    while (!done()) {
      if (peek().kind != Token::Ident) fail("expected a statement");
      std::string kw = next().text;
      if (kw == "type")
        parse_type();
      else if (kw == "percolate")
        parse_percolate();
      else
        parse_constraint(kw);
    }
    synthesize_percolation();
    out.core.resolve_lists();
  }
};

// ---------------------------------------------------------------------------
// rule files

struct RuleParser : Parser {
  TypeHierarchy& hier;
  RuleFile out;
  int rule_no = 0;

  RuleParser(const std::string& text, TypeHierarchy& h) : Parser(text), hier(h) {}

  static bool is_decl(const std::string& s) {
    return s == "letters" || s == "null" || s == "morphboundary" ||
           s == "wordboundary" || s == "set" || s == "pair";
  }

  // a context/transition element: name, quoted char, or a lone symbol like +
  std::string element_token() {
    if (peek().kind == Token::Ident || peek().kind == Token::Atom) return next().text;
    if (peek().kind == Token::Punct && peek().text.size() == 1) {
      char c = peek().text[0];
      if (std::strchr(":,;.[]{}()=", c) == nullptr) return next().text;
    }
    fail("expected a character or set name");
  }

  Char one_char(const std::string& s) {
    auto u = utf8_to_u32(s);
    if (u.size() != 1) fail("expected a single character, got '" + s + "'");
    return u[0];
  }

  std::set<Char> resolve_element(const std::string& s) {
    if (s == "_") return {}; // wildcard side
    auto it = out.alphabet.sets.find(s);
    if (it != out.alphabet.sets.end()) return it->second;
    auto u = utf8_to_u32(s);
    if (u.size() == 1) return {u[0]};
    fail("unknown set '" + s + "'");
  }

  void parse_decl(const std::string& kw) {
    if (kw == "letters") {
      while (!at_punct(";")) out.alphabet.letters.insert(one_char(element_token()));
    } else if (kw == "null") {
      out.alphabet.null_char = one_char(element_token());
    } else if (kw == "morphboundary") {
      out.alphabet.morph_boundary = one_char(element_token());
    } else if (kw == "wordboundary") {
      out.alphabet.word_boundary = one_char(element_token());
    } else if (kw == "set") {
      std::string name = expect_ident("a set name");
      expect_punct("=");
      expect_punct("{");
      std::set<Char> members;
      if (!at_punct("}")) do {
          members.insert(one_char(element_token()));
        } while (accept_punct(","));
      expect_punct("}");
      out.alphabet.sets[name] = std::move(members);
    } else { // pair
      Char l = one_char(element_token());
      expect_punct(":");
      Char s = one_char(element_token());
      out.alphabet.pairs.insert({l, s});
    }
    expect_punct(";");
  }

  // a bare element restricts the lexical side only; l:s restricts both
  CtxItem parse_item() {
    CtxItem item;
    std::string a = element_token();
    item.lex = resolve_element(a);
    if (accept_punct(":")) item.surf = resolve_element(element_token());
    return item;
  }

  std::vector<CtxItem> parse_context() {
    std::vector<CtxItem> items;
    if (accept_punct("[")) {
      if (!at_punct("]")) do {
          items.push_back(parse_item());
        } while (accept_punct(","));
      expect_punct("]");
      return items;
    }
    // a lone _ means no context at all; _:x is still a single item
    if (peek().kind == Token::Ident && peek().text == "_" &&
        !(peek(1).kind == Token::Punct && peek(1).text == ":")) {
      next();
      return items;
    }
    items.push_back(parse_item());
    return items;
  }

  RuleDir arrow() {
    if (accept_punct("<=>")) return RuleDir::Both;
    if (accept_punct("=>")) return RuleDir::OnlyInContext;
    if (accept_punct("<=")) return RuleDir::AlwaysInContext;
    fail("expected a rule arrow");
  }

  void parse_rule() {
    TwoLevelRule r;
    ++rule_no;
    auto lcon = parse_context();
    r.dir = arrow();
    r.lex = one_char(element_token());
    expect_punct(":");
    r.surf = one_char(element_token());
    if (arrow() != r.dir) fail("the two rule arrows must match");
    r.rcon = parse_context();
    r.lcon = std::move(lcon);
    std::reverse(r.lcon.begin(), r.lcon.end()); // stored innermost pair first
    if (accept_punct(":-")) {
      if (expect_ident("filter") != "filter") fail("expected 'filter'");
      expect_punct("(");
      do {
        FilterCond fc;
        fc.path.push_back(hier.intern_feature(expect_ident("a feature name")));
        while (accept_punct(":"))
          fc.path.push_back(hier.intern_feature(expect_ident("a feature name")));
        expect_punct("=");
        if (peek().kind == Token::Str) {
          fc.literal = utf8_to_u32(next().text);
          fc.type = kTopType;
        } else {
          std::string v = type_value_token();
          if (auto t = hier.find_type(v))
            fc.type = *t;
          else
            fail("unknown type '" + v + "'");
        }
        r.filter.push_back(std::move(fc));
      } while (accept_punct(","));
      expect_punct(")");
    }
    expect_punct(".");
    r.label = "rule " + std::to_string(rule_no) + " (" +
              u32_to_utf8(std::u32string(1, r.lex)) + ":" +
              u32_to_utf8(std::u32string(1, r.surf)) + ")";
    out.rules.push_back(std::move(r));
  }

  std::string type_value_token() {
    if (peek().kind == Token::Ident || peek().kind == Token::Atom) return next().text;
    if (peek().kind == Token::Punct && peek().text.size() == 1 &&
        std::strchr(":,;.()=", peek().text[0]) == nullptr)
      return next().text;
    fail("expected a filter value");
  }

  void run() {
    while (!done()) {
      if (peek().kind == Token::Ident && is_decl(peek().text) &&
          !(peek(1).kind == Token::Punct &&
            (peek(1).text == "<=>" || peek(1).text == "=>" || peek(1).text == "<=" ||
             peek(1).text == ":")))
        parse_decl(next().text);
      else
        parse_rule();
    }
  }
};

// ---------------------------------------------------------------------------
// AVM values and the lexica

struct AvmParser : Parser {
  Engine& eng;
  std::map<int, NodeId> tags;

  AvmParser(Engine& e, const std::string& text) : Parser(text), eng(e) {}

  TypeId require_type(const std::string& n) {
    if (auto t = eng.hierarchy().find_type(n)) return *t;
    fail("unknown type '" + n + "'");
  }

  bool value_starts() const {
    const Token& t = peek();
    if (t.kind == Token::Str || t.kind == Token::Atom || t.kind == Token::Ident ||
        t.kind == Token::Tag)
      return true;
    return t.kind == Token::Punct && (t.text == "[" || t.text == "<");
  }

  NodeId parse_value() {
    const Token& t = peek();
    if (t.kind == Token::Tag) {
      int id = std::stoi(next().text);
      auto it = tags.find(id);
      if (it == tags.end()) {
        NodeId n = value_starts() ? parse_value() : eng.new_node(kTopType);
        tags[id] = n;
        return n;
      }
      if (value_starts()) {
        NodeId v = parse_value();
        if (!eng.unify(it->second, v)) fail("tag value clashes with earlier use");
      }
      return it->second;
    }
    if (t.kind == Token::Str) return eng.new_string(utf8_to_u32(next().text));
    if (t.kind == Token::Atom) return typed_block(require_type(next().text));
    if (t.kind == Token::Ident) return typed_block(require_type(next().text));
    if (at_punct("[")) return typed_block(kTopType);
    if (at_punct("<")) return parse_list();
    fail("expected a value");
  }

  NodeId typed_block(TypeId ty) {
    NodeId n = eng.new_node(ty);
    if (accept_punct("[")) {
      if (!at_punct("]")) do {
          std::string fname = expect_ident("a feature name");
          expect_punct(":");
          auto f = eng.hierarchy().find_feature(fname);
          if (!f) fail("unknown feature '" + fname + "'");
          NodeId v = parse_value();
          if (!eng.path_put(n, {*f}, v))
            fail("ill-typed value for feature '" + fname + "'");
        } while (accept_punct(","));
      expect_punct("]");
    }
    return n;
  }

  NodeId parse_list() {
    expect_punct("<");
    if (!eng.core().lists) fail("list syntax needs elist/nelist types");
    const ListTypes& lt = *eng.core().lists;
    std::vector<NodeId> items;
    if (!at_punct(">")) do {
        items.push_back(parse_value());
      } while (accept_punct(","));
    expect_punct(">");
    NodeId tail = eng.new_node(lt.elist);
    for (size_t i = items.size(); i-- > 0;) {
      NodeId cell = eng.new_node(lt.nelist);
      if (!eng.path_put(cell, {lt.first}, items[i]) ||
          !eng.path_put(cell, {lt.rest}, tail))
        fail("ill-typed list element");
      tail = cell;
    }
    return tail;
  }
};

FeatId require_feature(const TypeHierarchy& h, const char* name, const char* use) {
  if (auto f = h.find_feature(name)) return *f;
  throw LoadError(std::string(use) + " needs the feature '" + name + "'");
}

} // namespace

GrammarFile parse_grammar(const std::string& text) {
  GrammarParser p(text);
  p.run();
  return std::move(p.out);
}

RuleFile parse_rule_file(const std::string& text, TypeHierarchy& hier) {
  RuleParser p(text, hier);
  p.run();
  return std::move(p.out);
}

NodeId parse_avm(Engine& eng, const std::string& text) {
  AvmParser p(eng, text);
  NodeId n = p.parse_value();
  p.accept_punct(".");
  if (!p.done()) p.fail("trailing input after the value");
  return n;
}

void load_morphs(Engine& eng, Lexicon& lex, const Alphabet& alphabet,
                 const std::string& text) {
  const TypeHierarchy& h = eng.hierarchy();
  auto marg = h.find_type("marg");
  auto functor = h.find_type("mfunctor");
  if (!marg) throw LoadError("the morph lexicon needs a marg type");
  std::set<Char> lexical = alphabet.lexical_chars();

  AvmParser p(eng, text);
  while (!p.done()) {
    if (p.expect_ident("'morph'") != "morph") p.fail("expected 'morph'");
    if (p.peek().kind != Token::Str) p.fail("expected the morph string");
    std::u32string key = utf8_to_u32(p.next().text);
    p.expect_punct(":");
    p.tags.clear();
    NodeId node = p.parse_value();
    p.expect_punct(".");

    std::string key8 = u32_to_utf8(key);
    for (Char c : key)
      if (!lexical.count(c))
        throw LoadError("morph '" + key8 + "' uses a character outside the lexical alphabet");
    TypeId ty = eng.type_of(node);
    bool is_arg = h.subtype(ty, *marg);
    bool is_fun = functor && h.subtype(ty, *functor);
    if (!is_arg && !is_fun)
      throw LoadError("morph '" + key8 + "' must be a marg or a functor");
    FeatId wire = is_arg ? require_feature(h, "mstring", "the morph lexicon")
                         : require_feature(h, "affix", "the morph lexicon");
    if (!eng.put_string(node, {wire}, key))
      throw LoadError("morph '" + key8 + "': entry clashes with its lexical string");
    lex.add_morph({key, node});
  }
}

void load_lexemes(Engine& eng, Lexicon& lex, const std::string& text) {
  AvmParser p(eng, text);
  while (!p.done()) {
    if (p.expect_ident("'lexeme'") != "lexeme") p.fail("expected 'lexeme'");
    if (p.peek().kind != Token::Str) p.fail("expected the stem string");
    std::u32string stem = utf8_to_u32(p.next().text);
    p.expect_punct(":");
    p.tags.clear();
    NodeId node = p.parse_value();
    p.expect_punct(".");
    lex.add_lexeme({stem, node});
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace morphounify
