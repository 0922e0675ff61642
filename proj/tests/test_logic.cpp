#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "efo/dnf.hpp"
#include "efo/error.hpp"
#include "efo/formula.hpp"
#include "efo/parse.hpp"

using namespace efo;

TEST_CASE("parse: single atom") {
  FormulaPtr f = parse_efo1("r1(a0,f)");
  REQUIRE(f->op() == Formula::Op::Atom);
  CHECK(f->relation() == 1);
  CHECK(f->head() == Term::constant(0));
  CHECK(f->tail() == Term::free_var("f"));
}

TEST_CASE("parse: the 2m shape binds the shared variable once") {
  FormulaPtr f = parse_efo1("r1(a0,x1)&r2(x1,f)&r3(x1,f)");
  REQUIRE(f->op() == Formula::Op::Exists);
  CHECK(f->var() == "x1");
  auto clauses = to_dnf(f);
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0].literals.size() == 3);
  CHECK(clauses[0].exist_vars == std::vector<std::string>{"x1"});
}

TEST_CASE("parse: negation over a compound is rejected") {
  CHECK_THROWS_WITH_AS(parse_efo1("!(r1(a0,x1)&r2(x1,f))"),
                       doctest::Contains("negation over non-atom"), Error);
  CHECK_THROWS_AS(parse_efo1("!!r1(a0,f)"), Error);
}

TEST_CASE("parse: missing free variable and syntax errors") {
  CHECK_THROWS_WITH_AS(parse_efo1("r1(a0,x1)"),
                       doctest::Contains("no free variable"), Error);
  CHECK_THROWS_AS(parse_efo1("r1(a0,f"), Error);
  CHECK_THROWS_AS(parse_efo1("r1(a0,f) r2(a0,f)"), Error);
  CHECK_THROWS_AS(parse_efo1("q1(a0,f)"), Error);
}

TEST_CASE("parse: explicit binder prefix and e-style entities") {
  FormulaPtr f = parse_efo1("EX x1. r1(e2,x1) & r2(x1,f)");
  REQUIRE(f->op() == Formula::Op::Exists);
  FormulaPtr g = parse_efo1("r1(a2,x1)&r2(x1,f)");
  CHECK(f->equals(*g));
}

TEST_CASE("print round-trips through the parser") {
  const char* queries[] = {
      "r1(a0,f)",
      "r1(a0,x1)&r2(x1,f)&r3(x1,f)",
      "r1(a0,f)|r2(a1,f)",
      "(r1(a0,f)|r2(a1,f))&r3(a2,f)",
      "!r2(a1,f)&r1(a0,f)",
      "r1(a0,x1)&!r2(x1,f)&r3(a2,f)",
      "r1(a0,x1)&r2(x1,x2)&r3(x2,f)&r4(x1,x2)",
      "(r1(a0,x1)|r2(a1,x1))&r3(x1,f)",
  };
  for (const char* q : queries) {
    FormulaPtr f = parse_efo1(q);
    FormulaPtr again = parse_efo1(print(f));
    CHECK_MESSAGE(f->equals(*again), q);
  }
}

TEST_CASE("random formulas round-trip") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    // Random conjunction/disjunction tree over a small atom pool.
    std::vector<std::string> atoms = {"r0(a0,f)", "r1(a1,x1)", "r2(x1,f)",
                                      "!r0(x1,x2)", "r1(x2,f)"};
    std::string text = atoms[rng() % atoms.size()];
    for (int i = 0; i < 4; ++i) {
      std::string op = rng() % 2 ? "&" : "|";
      std::string next = atoms[rng() % atoms.size()];
      if (rng() % 2) {
        text = "(" + text + ")" + op + next;
      } else {
        text = next + op + "(" + text + ")";
      }
    }
    FormulaPtr f;
    try {
      f = parse_efo1(text);
    } catch (const Error&) {
      continue;  // some combinations lack the free variable
    }
    FormulaPtr again = parse_efo1(print(f));
    CHECK_MESSAGE(f->equals(*again), text);
  }
}

TEST_CASE("lisp: single projection") {
  FormulaPtr f = parse_lisp("(p,(e))", {1}, {0});
  CHECK(f->equals(*parse_efo1("r1(a0,f)")));
}

TEST_CASE("lisp: intersection of two projections") {
  FormulaPtr f = parse_lisp("(i,(p,(e)),(p,(e)))", {1, 2}, {0, 1});
  CHECK(f->equals(*parse_efo1("r1(a0,f)&r2(a1,f)")));
}

TEST_CASE("lisp: negation over a chain produces the universal rejection") {
  FormulaPtr f = parse_lisp("(i,(n,(p,(p,(e)))),(p,(e)))", {1, 0, 2}, {0, 1});
  CHECK_THROWS_WITH_AS(to_dnf(f), doctest::Contains("universal"), Error);
  CHECK(classify(f) == std::set<QueryClass>{QueryClass::NotEfo1});
}

TEST_CASE("lisp: grounding mismatch is an error") {
  CHECK_THROWS_AS(parse_lisp("(p,(e))", {1, 2}, {0}), Error);
  CHECK_THROWS_AS(parse_lisp("(p,(e))", {}, {0}), Error);
  CHECK_THROWS_AS(parse_lisp_tree("(z,(e))"), Error);
}

TEST_CASE("to_dnf: already in normal form") {
  auto clauses = to_dnf(parse_efo1("r1(a0,f)|r2(a1,f)"));
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].literals.size() == 1);
  CHECK(clauses[1].literals.size() == 1);
}

TEST_CASE("to_dnf: one distribution step") {
  auto clauses = to_dnf(parse_efo1("(r1(a0,f)|r2(a1,f))&r3(a2,f)"));
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].literals.size() == 2);
  CHECK(clauses[1].literals.size() == 2);
}

TEST_CASE("to_dnf: negated existential raises NotEFO1") {
  FormulaPtr inner = parse_efo1("r1(a0,x1)&r2(x1,f)");
  FormulaPtr f = Formula::negate(inner);
  CHECK_THROWS_AS(to_dnf(f), Error);
  try {
    to_dnf(f);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotEfo1);
  }
}

TEST_CASE("to_dnf: existentials rebind per clause") {
  // x1 is only used in the first disjunct.
  FormulaPtr f = parse_efo1("(r1(a0,x1)&r2(x1,f))|r3(a1,f)");
  auto clauses = to_dnf(f);
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].exist_vars == std::vector<std::string>{"x1"});
  CHECK(clauses[1].exist_vars.empty());
}

TEST_CASE("detect_trivial_subsentence") {
  CHECK(detect_trivial_subsentence(parse_efo1("r1(a0,a1)&r2(a0,f)")));
  CHECK_FALSE(detect_trivial_subsentence(parse_efo1("r2(a0,f)")));

  // EX x.(r1(a0,x) & r2(x,a1)) & r3(a2,f): the quantified part closes over
  // no free variable.
  FormulaPtr closed = Formula::exists(
      "x1", Formula::conj(
                Formula::atom(1, Term::constant(0), Term::exist_var("x1")),
                Formula::atom(2, Term::exist_var("x1"), Term::constant(1))));
  FormulaPtr f = Formula::conj(
      closed, Formula::atom(3, Term::constant(2), Term::free_var("f")));
  CHECK(detect_trivial_subsentence(f));

  CHECK_FALSE(
      detect_trivial_subsentence(parse_efo1("r1(a0,x1)&r2(x1,f)")));
}

TEST_CASE("classify: the named structures land in their classes") {
  // 2il
  CHECK(classify(parse_efo1("r1(a0,f)&r2(x1,f)")) ==
        std::set<QueryClass>{QueryClass::ExistentialLeaf});
  // 3c
  CHECK(classify(parse_efo1(
            "r1(a0,x1)&r2(x1,f)&r3(a1,x2)&r4(x2,f)&r5(x1,x2)")) ==
        std::set<QueryClass>{QueryClass::Cyclic});
  // 2p
  CHECK(classify(parse_efo1("r1(a0,x1)&r2(x1,f)")) ==
        std::set<QueryClass>{QueryClass::TreeFormSafe});
  // pni
  CHECK(classify(parse_efo1("r1(a0,x1)&!r2(x1,f)&r3(a1,f)")) ==
        std::set<QueryClass>{QueryClass::NegationNoConstant});
  // 2m
  CHECK(classify(parse_efo1("r1(a0,x1)&r2(x1,f)&r3(x1,f)")) ==
        std::set<QueryClass>{QueryClass::Multigraph});
  // 3cm carries both cycle and parallel edges
  auto cm = classify(parse_efo1(
      "r1(a0,x1)&r2(x1,f)&r3(a1,x2)&r4(x2,f)&r5(x1,x2)&r6(x1,f)"));
  CHECK(cm.count(QueryClass::Cyclic));
  CHECK(cm.count(QueryClass::Multigraph));
  // up stays tree-form
  CHECK(classify(parse_efo1("(r1(a0,x1)|r2(a1,x1))&r3(x1,f)")) ==
        std::set<QueryClass>{QueryClass::TreeFormSafe});
}
