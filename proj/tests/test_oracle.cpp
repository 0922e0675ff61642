#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "efo/error.hpp"
#include "efo/matrix_builder.hpp"
#include "efo/oracle.hpp"
#include "efo/parse.hpp"
#include "test_util.hpp"

using namespace efo;
using oracle::Semantics;

TEST_CASE("truth_value on ground atoms and their negations") {
  MatrixSet m = test::toy_perfect();
  FormulaPtr stored = Formula::atom(0, Term::constant(0), Term::constant(1));
  CHECK(oracle::truth_value(stored, 0, m, Semantics{}) == 1.0);
  CHECK(oracle::truth_value(Formula::negate(stored), 0, m, Semantics{}) ==
        0.0);

  FormulaPtr exists = parse_efo1("r0(a0,x1)&r1(x1,f)");
  // With the free variable bound to a3 the chain is satisfied.
  CHECK(oracle::truth_value(exists, 3, m, Semantics{}) == 1.0);
}

TEST_CASE("answer_vector_bruteforce on the toy graph") {
  MatrixSet m = test::toy_perfect();
  FuzzyVector v = oracle::answer_vector_bruteforce(parse_efo1("r0(a0,f)"), m,
                                                   Semantics{});
  CHECK(test::dense(v) == std::vector<double>{0, 1, 1, 0});

  MatrixSet empty = perfect_matrices(KnowledgeGraph(4, 2, {}));
  FuzzyVector zero = oracle::answer_vector_bruteforce(
      parse_efo1("r0(a0,f)"), empty, Semantics{});
  CHECK(test::dense(zero) == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("answer_set_symbolic on the toy graph") {
  KnowledgeGraph kg = test::toy_kg();
  CHECK(oracle::answer_set_symbolic(parse_efo1("r0(a0,x1)&r1(x1,f)"), kg) ==
        std::set<EntityId>{1, 3});
  // Unsatisfiable constant atom.
  CHECK(oracle::answer_set_symbolic(parse_efo1("r0(a1,a0)&r0(a0,f)"), kg)
            .empty());
  // 2il: intersect r0(a0,.) tails with entities having any r1 in-edge.
  CHECK(oracle::answer_set_symbolic(parse_efo1("r0(a0,f)&r1(x1,f)"), kg) ==
        std::set<EntityId>{1});
}

TEST_CASE("symbolic answers equal the support of the fuzzy evaluation") {
  std::mt19937_64 rng(23);
  const char* queries[] = {
      "r0(a0,f)",
      "r0(a0,x1)&r1(x1,f)",
      "r0(a0,f)|r1(a1,f)",
      "r0(a0,x1)&!r1(x1,f)&r1(a1,f)",
      "r1(x1,f)&r0(a0,f)",
  };
  for (int round = 0; round < 25; ++round) {
    std::size_t n = 3 + rng() % 9;
    std::vector<Triple> triples;
    for (std::size_t k = 0; k < n * 3; ++k) {
      triples.push_back({static_cast<EntityId>(rng() % n),
                         static_cast<RelationId>(rng() % 2),
                         static_cast<EntityId>(rng() % n)});
    }
    KnowledgeGraph kg(n, 2, triples);
    MatrixSet m = perfect_matrices(kg);
    for (const char* q : queries) {
      FormulaPtr f = parse_efo1(q);
      std::set<EntityId> symbolic = oracle::answer_set_symbolic(f, kg);
      FuzzyVector fuzzy =
          oracle::answer_vector_bruteforce(f, m, Semantics{});
      for (std::size_t a = 0; a < n; ++a) {
        CHECK(fuzzy[a] == (symbolic.count(static_cast<EntityId>(a)) ? 1.0
                                                                    : 0.0));
      }
    }
  }
}

TEST_CASE("assignment budget guards exponential blowups") {
  MatrixSet m = test::toy_perfect();
  oracle::OracleLimit limit;
  limit.max_assignments = 2;
  CHECK_THROWS_AS(
      oracle::answer_vector_bruteforce(parse_efo1("r0(a0,x1)&r1(x1,f)"), m,
                                       Semantics{}, limit),
      Error);
}

TEST_CASE("operator-tree evaluation matches brute force on tree shapes") {
  MatrixSet m = test::toy_perfect();
  Semantics sem;  // product conjunction, godel elsewhere

  // 1p
  FuzzyVector tree =
      oracle::operator_tree_maxprod(parse_lisp_tree("(p,(e))"), {0}, {0}, m);
  FuzzyVector brute =
      oracle::answer_vector_bruteforce(parse_efo1("r0(a0,f)"), m, sem);
  CHECK(tree == brute);

  // 2i as elementwise product of two rows.
  tree = oracle::operator_tree_maxprod(parse_lisp_tree("(i,(p,(e)),(p,(e)))"),
                                       {1, 1}, {1, 2}, m);
  brute = oracle::answer_vector_bruteforce(parse_efo1("r1(a1,f)&r1(a2,f)"),
                                           m, sem);
  CHECK(tree == brute);

  // 2in: row1 * (1 - row2).
  tree = oracle::operator_tree_maxprod(
      parse_lisp_tree("(i,(p,(e)),(n,(p,(e))))"), {1, 1}, {1, 2}, m);
  brute = oracle::answer_vector_bruteforce(
      parse_efo1("r1(a1,f)&!r1(a2,f)"), m, sem);
  CHECK(tree == brute);
}

TEST_CASE("operator-tree evaluation rejects negated existential subtrees") {
  MatrixSet m = test::toy_perfect();
  CHECK_THROWS_AS(
      oracle::operator_tree_maxprod(
          parse_lisp_tree("(i,(n,(p,(p,(e)))),(p,(e)))"), {1, 0, 1}, {0, 1},
          m),
      Error);
}
