#pragma once

#include <memory>
#include <string>
#include <vector>

#include "efo/kg.hpp"

namespace efo {

struct Term {
  enum class Kind { Constant, FreeVar, ExistVar };

  Kind kind = Kind::Constant;
  EntityId entity = 0;    // Constant
  std::string name;       // FreeVar / ExistVar

  static Term constant(EntityId e) { return {Kind::Constant, e, {}}; }
  static Term free_var(std::string n) {
    return {Kind::FreeVar, 0, std::move(n)};
  }
  static Term exist_var(std::string n) {
    return {Kind::ExistVar, 0, std::move(n)};
  }

  bool is_var() const { return kind != Kind::Constant; }
  friend bool operator==(const Term&, const Term&) = default;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable recursive formula node. Negation over compound formulas is
// representable (tree-form inputs produce it) but is rejected later when DNF
// normalization cannot eliminate it within the fragment.
class Formula {
 public:
  enum class Op { Atom, Not, And, Or, Exists };

  static FormulaPtr atom(RelationId r, Term head, Term tail);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr exists(std::string var, FormulaPtr body);

  Op op() const { return op_; }

  RelationId relation() const { return relation_; }
  const Term& head() const { return head_; }
  const Term& tail() const { return tail_; }

  const FormulaPtr& lhs() const { return lhs_; }
  const FormulaPtr& rhs() const { return rhs_; }
  const std::string& var() const { return var_; }

  // Variable names occurring unbound in this subformula.
  std::vector<std::string> free_names() const;

  bool equals(const Formula& other) const;

 private:
  Formula() = default;

  Op op_ = Op::Atom;
  RelationId relation_ = 0;
  Term head_;
  Term tail_;
  std::string var_;
  FormulaPtr lhs_;
  FormulaPtr rhs_;
};

// Canonical text form; parse_efo1(print(f)) reproduces f for formulas inside
// the fragment the grammar covers.
std::string print(const Formula& f);
std::string print(const FormulaPtr& f);

struct Literal {
  RelationId relation = 0;
  Term head;
  Term tail;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
};

// One conjunctive disjunct: existentially quantified variables plus a
// (multiset) list of signed atoms. The free variable occurs in at least one
// literal.
struct ConjunctiveClause {
  std::string free_var;
  std::vector<std::string> exist_vars;  // order of first occurrence
  std::vector<Literal> literals;

  bool has_existential() const { return !exist_vars.empty(); }
};

}  // namespace efo
