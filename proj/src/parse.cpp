#include "efo/parse.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>

#include "efo/error.hpp"

namespace efo {

namespace {

constexpr const char* kFreeName = "f";

class Efo1Parser {
 public:
  explicit Efo1Parser(const std::string& text) : text_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_formula();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");

    f = bind_implicit(f);
    auto frees = f->free_names();
    if (frees.empty()) fail("formula has no free variable");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    raise(ErrorCode::Parse, "query syntax error at position " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(
                                      static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool peek_keyword(const char* kw) {
    skip_space();
    std::size_t len = std::strlen(kw);
    if (text_.compare(pos_, len, kw) != 0) return false;
    // Must not run into a longer identifier.
    std::size_t after = pos_ + len;
    return after >= text_.size() ||
           !std::isalnum(static_cast<unsigned char>(text_[after]));
  }

  std::string read_ident() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ == start) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  std::uint32_t ident_index(const std::string& ident, std::size_t prefix_len) {
    if (ident.size() <= prefix_len) fail("identifier needs an index");
    for (std::size_t i = prefix_len; i < ident.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(ident[i]))) {
        fail("identifier index must be numeric: " + ident);
      }
    }
    return static_cast<std::uint32_t>(std::stoul(ident.substr(prefix_len)));
  }

  // formula := ['EX' varlist '.'] or_expr
  FormulaPtr parse_formula() {
    if (peek_keyword("EX")) {
      pos_ += 2;
      std::vector<std::string> vars;
      do {
        std::string v = read_ident();
        if (v.empty() || v[0] != 'x') fail("binder must list x<k> variables");
        vars.push_back(v);
      } while (eat(','));
      expect('.');
      FormulaPtr body = parse_or();
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        body = Formula::exists(*it, body);
      }
      return body;
    }
    return parse_or();
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (eat('|')) {
      lhs = Formula::disj(lhs, parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (eat('&')) {
      lhs = Formula::conj(lhs, parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (eat('!')) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        fail("negation over non-atom: '!' applies to atomic formulas only");
      }
      FormulaPtr inner = parse_unary();
      if (inner->op() != Formula::Op::Atom) {
        fail("negation over non-atom: '!' applies to atomic formulas only");
      }
      return Formula::negate(inner);
    }
    if (eat('(')) {
      FormulaPtr inner = parse_formula();
      expect(')');
      return inner;
    }
    return parse_atom();
  }

  Term parse_term() {
    std::string ident = read_ident();
    if (ident == kFreeName) return Term::free_var(kFreeName);
    switch (ident[0]) {
      case 'a':
      case 'e':
        return Term::constant(ident_index(ident, 1));
      case 'x':
        ident_index(ident, 1);  // validates the shape
        return Term::exist_var(ident);
      default:
        fail("expected term (a<k>, e<k>, x<k> or f): " + ident);
    }
  }

  FormulaPtr parse_atom() {
    std::string ident = read_ident();
    if (ident.empty() || ident[0] != 'r') {
      fail("expected relation r<k>: " + ident);
    }
    RelationId rel = ident_index(ident, 1);
    expect('(');
    Term head = parse_term();
    expect(',');
    Term tail = parse_term();
    expect(')');
    return Formula::atom(rel, std::move(head), std::move(tail));
  }

  // Wraps variables that no EX binder covers; they are existential by
  // convention. Binding order follows first occurrence.
  FormulaPtr bind_implicit(FormulaPtr f) {
    std::vector<std::string> frees = f->free_names();
    std::vector<std::string> unbound;
    for (const std::string& name : frees) {
      if (name != kFreeName) unbound.push_back(name);
    }
    for (auto it = unbound.rbegin(); it != unbound.rend(); ++it) {
      f = Formula::exists(*it, f);
    }
    return f;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

void check_unique_binders(const Formula& f, std::set<std::string>& seen) {
  if (f.op() == Formula::Op::Exists) {
    if (!seen.insert(f.var()).second) {
      raise(ErrorCode::Parse,
            "variable bound more than once: " + f.var());
    }
  }
  if (f.lhs()) check_unique_binders(*f.lhs(), seen);
  if (f.rhs()) check_unique_binders(*f.rhs(), seen);
}

}  // namespace

FormulaPtr parse_efo1(const std::string& text) {
  Efo1Parser parser(text);
  FormulaPtr f = parser.parse();
  std::set<std::string> seen;
  check_unique_binders(*f, seen);
  return f;
}

namespace {

class LispParser {
 public:
  explicit LispParser(const std::string& text) : text_(text) {}

  LispNode parse() {
    LispNode root = parse_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    raise(ErrorCode::Parse, "operator-tree syntax error at position " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(
                                      text_[pos_])))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  LispNode parse_node() {
    expect('(');
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    char tag = text_[pos_++];
    if (tag != 'p' && tag != 'i' && tag != 'u' && tag != 'n' && tag != 'e') {
      fail(std::string("unknown token '") + tag + "'");
    }
    LispNode node;
    node.tag = tag;
    while (eat(',')) {
      node.children.push_back(parse_node());
    }
    expect(')');

    switch (tag) {
      case 'e':
        if (!node.children.empty()) fail("entity leaf takes no children");
        break;
      case 'p':
      case 'n':
        if (node.children.size() != 1) {
          fail(std::string("'") + tag + "' takes exactly one child");
        }
        break;
      case 'i':
      case 'u':
        if (node.children.size() < 2) {
          fail(std::string("'") + tag + "' takes at least two children");
        }
        break;
    }
    return node;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

class LispGrounder {
 public:
  LispGrounder(const std::vector<RelationId>& relations,
               const std::vector<EntityId>& entities)
      : relations_(relations), entities_(entities) {}

  FormulaPtr ground(const LispNode& root) {
    FormulaPtr f = build(root, Term::free_var(kFreeName));
    if (rel_pos_ != relations_.size() || ent_pos_ != entities_.size()) {
      raise(ErrorCode::Validation,
            "grounding mismatch: unused relations or entities");
    }
    return f;
  }

 private:
  RelationId next_relation() {
    if (rel_pos_ >= relations_.size()) {
      raise(ErrorCode::Validation,
            "grounding mismatch: more p tokens than relations");
    }
    return relations_[rel_pos_++];
  }

  EntityId next_entity() {
    if (ent_pos_ >= entities_.size()) {
      raise(ErrorCode::Validation,
            "grounding mismatch: more e tokens than entities");
    }
    return entities_[ent_pos_++];
  }

  FormulaPtr build(const LispNode& node, const Term& out) {
    switch (node.tag) {
      case 'p': {
        RelationId rel = next_relation();
        const LispNode& child = node.children[0];
        if (child.tag == 'e') {
          return Formula::atom(rel, Term::constant(next_entity()), out);
        }
        std::string var = "x" + std::to_string(++var_counter_);
        FormulaPtr sub = build(child, Term::exist_var(var));
        return Formula::exists(
            var, Formula::conj(Formula::atom(rel, Term::exist_var(var), out),
                               std::move(sub)));
      }
      case 'i':
      case 'u': {
        FormulaPtr acc = build(node.children[0], out);
        for (std::size_t i = 1; i < node.children.size(); ++i) {
          FormulaPtr next = build(node.children[i], out);
          acc = node.tag == 'i' ? Formula::conj(acc, next)
                                : Formula::disj(acc, next);
        }
        return acc;
      }
      case 'n':
        return Formula::negate(build(node.children[0], out));
      case 'e':
        raise(ErrorCode::Parse, "entity leaf outside a projection");
      default:
        raise(ErrorCode::Internal, "bad operator-tree tag");
    }
  }

  const std::vector<RelationId>& relations_;
  const std::vector<EntityId>& entities_;
  std::size_t rel_pos_ = 0;
  std::size_t ent_pos_ = 0;
  int var_counter_ = 0;
};

}  // namespace

LispNode parse_lisp_tree(const std::string& text) {
  return LispParser(text).parse();
}

FormulaPtr lisp_to_formula(const LispNode& tree,
                           const std::vector<RelationId>& relations,
                           const std::vector<EntityId>& entities) {
  return LispGrounder(relations, entities).ground(tree);
}

FormulaPtr parse_lisp(const std::string& text,
                      const std::vector<RelationId>& relations,
                      const std::vector<EntityId>& entities) {
  return lisp_to_formula(parse_lisp_tree(text), relations, entities);
}

}  // namespace efo
