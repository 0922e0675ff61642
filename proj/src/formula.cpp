#include "efo/formula.hpp"

#include <algorithm>
#include <set>

#include "efo/error.hpp"

namespace efo {

FormulaPtr Formula::atom(RelationId r, Term head, Term tail) {
  auto f = FormulaPtr(new Formula());
  auto* m = const_cast<Formula*>(f.get());
  m->op_ = Op::Atom;
  m->relation_ = r;
  m->head_ = std::move(head);
  m->tail_ = std::move(tail);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr f) {
  auto out = FormulaPtr(new Formula());
  auto* m = const_cast<Formula*>(out.get());
  m->op_ = Op::Not;
  m->lhs_ = std::move(f);
  return out;
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  auto out = FormulaPtr(new Formula());
  auto* m = const_cast<Formula*>(out.get());
  m->op_ = Op::And;
  m->lhs_ = std::move(a);
  m->rhs_ = std::move(b);
  return out;
}

FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  auto out = FormulaPtr(new Formula());
  auto* m = const_cast<Formula*>(out.get());
  m->op_ = Op::Or;
  m->lhs_ = std::move(a);
  m->rhs_ = std::move(b);
  return out;
}

FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
  auto out = FormulaPtr(new Formula());
  auto* m = const_cast<Formula*>(out.get());
  m->op_ = Op::Exists;
  m->var_ = std::move(var);
  m->lhs_ = std::move(body);
  return out;
}

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  switch (f.op()) {
    case Formula::Op::Atom:
      for (const Term* t : {&f.head(), &f.tail()}) {
        if (t->is_var() &&
            std::find(bound.begin(), bound.end(), t->name) == bound.end() &&
            std::find(out.begin(), out.end(), t->name) == out.end()) {
          out.push_back(t->name);
        }
      }
      break;
    case Formula::Op::Not:
      collect_free(*f.lhs(), bound, out);
      break;
    case Formula::Op::And:
    case Formula::Op::Or:
      collect_free(*f.lhs(), bound, out);
      collect_free(*f.rhs(), bound, out);
      break;
    case Formula::Op::Exists:
      bound.push_back(f.var());
      collect_free(*f.lhs(), bound, out);
      bound.pop_back();
      break;
  }
}

}  // namespace

std::vector<std::string> Formula::free_names() const {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(*this, bound, out);
  return out;
}

bool Formula::equals(const Formula& other) const {
  if (op_ != other.op_) return false;
  switch (op_) {
    case Op::Atom:
      return relation_ == other.relation_ && head_ == other.head_ &&
             tail_ == other.tail_;
    case Op::Not:
      return lhs_->equals(*other.lhs_);
    case Op::And:
    case Op::Or:
      return lhs_->equals(*other.lhs_) && rhs_->equals(*other.rhs_);
    case Op::Exists:
      return var_ == other.var_ && lhs_->equals(*other.lhs_);
  }
  return false;
}

namespace {

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Constant:
      return "a" + std::to_string(t.entity);
    case Term::Kind::FreeVar:
    case Term::Kind::ExistVar:
      return t.name;
  }
  return "?";
}

// Precedence: Or < And < unary.
void print_rec(const Formula& f, int parent_prec, std::string& out) {
  switch (f.op()) {
    case Formula::Op::Atom:
      out += "r" + std::to_string(f.relation()) + "(" +
             print_term(f.head()) + "," + print_term(f.tail()) + ")";
      break;
    case Formula::Op::Not:
      out += "!";
      if (f.lhs()->op() == Formula::Op::Atom) {
        print_rec(*f.lhs(), 3, out);
      } else {
        out += "(";
        print_rec(*f.lhs(), 0, out);
        out += ")";
      }
      break;
    case Formula::Op::And: {
      bool paren = parent_prec > 2;
      if (paren) out += "(";
      print_rec(*f.lhs(), 2, out);
      out += "&";
      print_rec(*f.rhs(), 3, out);  // the parser left-associates
      if (paren) out += ")";
      break;
    }
    case Formula::Op::Or: {
      bool paren = parent_prec > 1;
      if (paren) out += "(";
      print_rec(*f.lhs(), 1, out);
      out += "|";
      print_rec(*f.rhs(), 2, out);
      if (paren) out += ")";
      break;
    }
    case Formula::Op::Exists: {
      // Merge a run of binders into one prefix list.
      std::vector<std::string> vars;
      const Formula* body = &f;
      while (body->op() == Formula::Op::Exists) {
        vars.push_back(body->var());
        body = body->lhs().get();
      }
      bool paren = parent_prec > 0;
      if (paren) out += "(";
      out += "EX ";
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ",";
        out += vars[i];
      }
      out += ".";
      print_rec(*body, 0, out);
      if (paren) out += ")";
      break;
    }
  }
}

}  // namespace

std::string print(const Formula& f) {
  std::string out;
  print_rec(f, 0, out);
  return out;
}

std::string print(const FormulaPtr& f) { return print(*f); }

}  // namespace efo
