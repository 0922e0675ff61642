#include "efo/dnf.hpp"

#include <algorithm>

#include "efo/error.hpp"
#include "efo/query_graph.hpp"

namespace efo {

const char* query_class_name(QueryClass c) {
  switch (c) {
    case QueryClass::TreeFormSafe:
      return "TreeFormSafe";
    case QueryClass::ExistentialLeaf:
      return "ExistentialLeaf";
    case QueryClass::NegationNoConstant:
      return "NegationNoConstant";
    case QueryClass::Multigraph:
      return "Multigraph";
    case QueryClass::Cyclic:
      return "Cyclic";
    case QueryClass::NotEfo1:
      return "NotEFO1";
  }
  return "?";
}

namespace {

// Negation-normal form with negation allowed on atoms only. Pushing a
// negation through an existential binder would need a universal quantifier,
// which the fragment excludes.
FormulaPtr to_nnf(const FormulaPtr& f, bool negated) {
  switch (f->op()) {
    case Formula::Op::Atom:
      return negated ? Formula::negate(f) : f;
    case Formula::Op::Not:
      return to_nnf(f->lhs(), !negated);
    case Formula::Op::And: {
      FormulaPtr a = to_nnf(f->lhs(), negated);
      FormulaPtr b = to_nnf(f->rhs(), negated);
      return negated ? Formula::disj(a, b) : Formula::conj(a, b);
    }
    case Formula::Op::Or: {
      FormulaPtr a = to_nnf(f->lhs(), negated);
      FormulaPtr b = to_nnf(f->rhs(), negated);
      return negated ? Formula::conj(a, b) : Formula::disj(a, b);
    }
    case Formula::Op::Exists:
      if (negated) {
        raise(ErrorCode::NotEfo1,
              "negated existential subformula: the normal form would "
              "universally quantify " +
                  f->var());
      }
      return Formula::exists(f->var(), to_nnf(f->lhs(), false));
  }
  raise(ErrorCode::Internal, "bad formula op");
}

struct ProtoClause {
  std::vector<Literal> literals;
};

std::vector<ProtoClause> collect_clauses(const FormulaPtr& f) {
  switch (f->op()) {
    case Formula::Op::Atom:
      return {{{Literal{f->relation(), f->head(), f->tail(), true}}}};
    case Formula::Op::Not: {
      const FormulaPtr& inner = f->lhs();
      if (inner->op() != Formula::Op::Atom) {
        raise(ErrorCode::Internal, "negation not on an atom after NNF");
      }
      return {
          {{Literal{inner->relation(), inner->head(), inner->tail(), false}}}};
    }
    case Formula::Op::Or: {
      auto out = collect_clauses(f->lhs());
      auto rhs = collect_clauses(f->rhs());
      out.insert(out.end(), rhs.begin(), rhs.end());
      return out;
    }
    case Formula::Op::And: {
      auto lhs = collect_clauses(f->lhs());
      auto rhs = collect_clauses(f->rhs());
      std::vector<ProtoClause> out;
      out.reserve(lhs.size() * rhs.size());
      for (const auto& a : lhs) {
        for (const auto& b : rhs) {
          ProtoClause c = a;
          c.literals.insert(c.literals.end(), b.literals.begin(),
                            b.literals.end());
          out.push_back(std::move(c));
        }
      }
      return out;
    }
    case Formula::Op::Exists:
      // Existentials distribute over disjunction; each clause re-binds the
      // variables it actually uses.
      return collect_clauses(f->lhs());
  }
  raise(ErrorCode::Internal, "bad formula op");
}

}  // namespace

std::vector<ConjunctiveClause> to_dnf(const FormulaPtr& formula) {
  auto frees = formula->free_names();
  if (frees.size() != 1) {
    raise(ErrorCode::Validation,
          "expected exactly one free variable, found " +
              std::to_string(frees.size()));
  }
  const std::string free_var = frees[0];

  FormulaPtr nnf = to_nnf(formula, false);
  std::vector<ProtoClause> protos = collect_clauses(nnf);

  std::vector<ConjunctiveClause> clauses;
  clauses.reserve(protos.size());
  for (const ProtoClause& p : protos) {
    ConjunctiveClause clause;
    clause.free_var = free_var;
    clause.literals = p.literals;
    bool mentions_free = false;
    for (const Literal& lit : clause.literals) {
      for (const Term* t : {&lit.head, &lit.tail}) {
        if (t->kind == Term::Kind::FreeVar) mentions_free = true;
        if (t->kind == Term::Kind::ExistVar &&
            std::find(clause.exist_vars.begin(), clause.exist_vars.end(),
                      t->name) == clause.exist_vars.end()) {
          clause.exist_vars.push_back(t->name);
        }
      }
    }
    if (!mentions_free) {
      raise(ErrorCode::TrivialSubsentence,
            "disjunct without the free variable is a sentence");
    }
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

namespace {

// Post-order free-name scan; flags any subformula whose unbound-variable set
// is empty.
bool has_sentence_subformula(const Formula& f,
                             std::vector<std::string>& unbound) {
  switch (f.op()) {
    case Formula::Op::Atom:
      unbound.clear();
      for (const Term* t : {&f.head(), &f.tail()}) {
        if (t->is_var()) unbound.push_back(t->name);
      }
      return unbound.empty();
    case Formula::Op::Not: {
      if (has_sentence_subformula(*f.lhs(), unbound)) return true;
      return unbound.empty();
    }
    case Formula::Op::And:
    case Formula::Op::Or: {
      std::vector<std::string> left;
      if (has_sentence_subformula(*f.lhs(), left)) return true;
      if (has_sentence_subformula(*f.rhs(), unbound)) return true;
      for (const std::string& name : left) {
        if (std::find(unbound.begin(), unbound.end(), name) == unbound.end()) {
          unbound.push_back(name);
        }
      }
      return unbound.empty();
    }
    case Formula::Op::Exists: {
      if (has_sentence_subformula(*f.lhs(), unbound)) return true;
      unbound.erase(std::remove(unbound.begin(), unbound.end(), f.var()),
                    unbound.end());
      return unbound.empty();
    }
  }
  return false;
}

}  // namespace

bool detect_trivial_subsentence(const FormulaPtr& formula) {
  std::vector<std::string> unbound;
  return has_sentence_subformula(*formula, unbound);
}

std::set<QueryClass> classify(const FormulaPtr& formula) {
  std::vector<ConjunctiveClause> clauses;
  try {
    clauses = to_dnf(formula);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotEfo1) return {QueryClass::NotEfo1};
    throw;
  }

  std::set<QueryClass> out;
  for (const ConjunctiveClause& clause : clauses) {
    QueryGraph g = QueryGraph::from_clause(clause);
    StructuralReport report = g.structural_report();
    if (!report.acyclic) out.insert(QueryClass::Cyclic);
    if (!report.simple) out.insert(QueryClass::Multigraph);
    if (report.property1) out.insert(QueryClass::NegationNoConstant);
    if (report.property2) out.insert(QueryClass::ExistentialLeaf);
  }
  if (out.empty()) out.insert(QueryClass::TreeFormSafe);
  return out;
}

}  // namespace efo
