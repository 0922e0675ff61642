#pragma once

#include <set>
#include <string>
#include <vector>

#include "efo/formula.hpp"

namespace efo {

enum class QueryClass {
  TreeFormSafe,
  ExistentialLeaf,
  NegationNoConstant,
  Multigraph,
  Cyclic,
  NotEfo1,
};

const char* query_class_name(QueryClass c);

// Disjunctive normal form: negation pushed onto atoms, existential binders
// distributed over disjuncts and re-scoped per clause. Raises NotEfo1 when a
// negation over an existential subformula would require a universal
// quantifier, and TrivialSubsentence when some disjunct never mentions the
// free variable.
std::vector<ConjunctiveClause> to_dnf(const FormulaPtr& formula);

// True iff some subformula is a sentence (no free occurrence of any
// variable), which makes the query trivial or redundant.
bool detect_trivial_subsentence(const FormulaPtr& formula);

// Structural taxonomy of the clause graphs; {NotEfo1} alone when DNF fails,
// {TreeFormSafe} when every clause graph is simple, acyclic and has neither
// a constant-free negated edge nor an existential leaf.
std::set<QueryClass> classify(const FormulaPtr& formula);

}  // namespace efo
