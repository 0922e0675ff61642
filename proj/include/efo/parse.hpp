#pragma once

#include <memory>
#include <string>
#include <vector>

#include "efo/formula.hpp"

namespace efo {

// Text grammar (lexical convention is fixed so query files stay portable):
//   atom      r<k>(term,term)      term: a<k> | e<k> entity, f free, x<k> var
//   '!'       negation, atoms only
//   '&' '|'   conjunction / disjunction ('&' binds tighter)
//   'EX x1,x2.' optional binder prefix; unbound non-free variables are
//   implicitly existential.
// The result has exactly one free variable named f.
FormulaPtr parse_efo1(const std::string& text);

// Operator-tree surface language: tokens p (projection), i (intersection),
// u (union), n (negation), e (entity leaf).
struct LispNode {
  char tag = 'e';
  std::vector<LispNode> children;
};

LispNode parse_lisp_tree(const std::string& text);

// Grounds a tree: one relation per p and one entity per e, both consumed in
// left-to-right (pre-order) text order. Projections introduce an existential
// chain; n negates the whole subformula.
FormulaPtr lisp_to_formula(const LispNode& tree,
                           const std::vector<RelationId>& relations,
                           const std::vector<EntityId>& entities);

FormulaPtr parse_lisp(const std::string& text,
                      const std::vector<RelationId>& relations,
                      const std::vector<EntityId>& entities);

}  // namespace efo
