#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "efo/dnf.hpp"
#include "efo/error.hpp"
#include "efo/parse.hpp"
#include "efo/query_graph.hpp"

using namespace efo;

namespace {

QueryGraph graph_of(const std::string& text) {
  auto clauses = to_dnf(parse_efo1(text));
  REQUIRE(clauses.size() == 1);
  return QueryGraph::from_clause(clauses[0]);
}

}  // namespace

TEST_CASE("from_clause: single atom gives two nodes and one edge") {
  QueryGraph g = graph_of("r1(a0,f)");
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.nodes()[g.free_node()].kind == QueryNode::Kind::Free);
}

TEST_CASE("from_clause: 2m has parallel edges") {
  QueryGraph g = graph_of("r1(a0,x1)&r2(x1,f)&r3(x1,f)");
  CHECK(g.nodes().size() == 3);
  CHECK(g.edges().size() == 3);
  StructuralReport r = g.structural_report();
  CHECK_FALSE(r.simple);
  CHECK(r.acyclic);
}

TEST_CASE("from_clause: 3c has five nodes, five edges and a cycle") {
  QueryGraph g = graph_of("r1(a0,x1)&r2(x1,f)&r3(a1,x2)&r4(x2,f)&r5(x1,x2)");
  CHECK(g.nodes().size() == 5);
  CHECK(g.edges().size() == 5);
  StructuralReport r = g.structural_report();
  CHECK_FALSE(r.acyclic);
  CHECK(r.simple);
}

TEST_CASE("from_clause reproduces the literal multiset") {
  auto clauses =
      to_dnf(parse_efo1("r1(a0,x1)&!r2(x1,f)&r3(a1,f)&r1(a0,x1)"));
  QueryGraph g = QueryGraph::from_clause(clauses[0]);
  CHECK(g.edges().size() == 4);  // duplicates preserved
  int negatives = 0;
  for (const QueryEdge& e : g.edges()) negatives += !e.positive;
  CHECK(negatives == 1);
}

TEST_CASE("from_clause rejects pathological clauses") {
  // Disconnected: component without the free variable.
  auto disconnected = to_dnf(parse_efo1("r1(a0,x1)&r2(a1,f)"));
  CHECK_THROWS_AS(QueryGraph::from_clause(disconnected[0]), Error);

  // Self-loop on a constant.
  ConjunctiveClause clause;
  clause.free_var = "f";
  clause.literals = {
      Literal{0, Term::constant(0), Term::constant(0), true},
      Literal{1, Term::constant(0), Term::free_var("f"), true}};
  CHECK_THROWS_AS(QueryGraph::from_clause(clause), Error);

  // A variable branch reaching the free variable only through a constant
  // hides a sentence.
  auto hidden = to_dnf(parse_efo1("r1(x1,a0)&r2(a0,f)"));
  CHECK_THROWS_WITH_AS(QueryGraph::from_clause(hidden[0]),
                       doctest::Contains("sentence"), Error);
}

TEST_CASE("structural_report: property flags per structure") {
  // pni: negated edge between variable and free variable.
  StructuralReport pni =
      graph_of("r1(a0,x1)&!r2(x1,f)&r3(a1,f)").structural_report();
  CHECK(pni.property1);
  CHECK_FALSE(pni.property2);

  // 2il: existential leaf, acyclic, simple.
  StructuralReport il = graph_of("r1(a0,f)&r2(x1,f)").structural_report();
  CHECK(il.property2);
  CHECK(il.acyclic);
  CHECK(il.simple);
  CHECK_FALSE(il.property1);

  // 2p chain: all flags benign.
  StructuralReport p2 = graph_of("r1(a0,x1)&r2(x1,f)").structural_report();
  CHECK(p2.acyclic);
  CHECK(p2.simple);
  CHECK_FALSE(p2.property1);
  CHECK_FALSE(p2.property2);

  // Negation with a constant endpoint stays out of property 1.
  StructuralReport in2 = graph_of("r1(a0,f)&!r2(a1,f)").structural_report();
  CHECK_FALSE(in2.property1);
}

TEST_CASE("structural_report: leaves are collapsed-degree-1 nodes") {
  QueryGraph g = graph_of("r1(a0,x1)&r2(x1,f)&r3(x1,f)");
  StructuralReport r = g.structural_report();
  // a0 and f are leaves (f's two parallel edges collapse).
  CHECK(r.leaves.size() == 2);
}

TEST_CASE("self-loops on variables are reported and break simplicity") {
  QueryGraph g = graph_of("r1(x1,x1)&r2(x1,f)");
  StructuralReport r = g.structural_report();
  CHECK(r.self_loops.size() == 1);
  CHECK_FALSE(r.simple);
  CHECK(r.acyclic);  // collapsed graph is a single edge
}

TEST_CASE("pick_enumeration_node on the reduced 3c cycle") {
  // Residual of 3c once the two constants are cut: the x1-x2-f triangle.
  QueryGraph g = graph_of("r2(x1,f)&r4(x2,f)&r5(x1,x2)");
  int picked = g.pick_enumeration_node();
  const QueryNode& n = g.nodes()[picked];
  CHECK(n.kind == QueryNode::Kind::Existential);
  CHECK(n.name == "x1");  // both x1/x2 tie on incident edges; first index wins

  // The full 3c graph still carries removable constants; the precondition
  // rejects it.
  QueryGraph full =
      graph_of("r1(a0,x1)&r2(x1,f)&r3(a1,x2)&r4(x2,f)&r5(x1,x2)");
  CHECK_THROWS_AS(full.pick_enumeration_node(), Error);
}

TEST_CASE("pick_enumeration_node on a triangle through the free variable") {
  QueryGraph g = graph_of("r1(x1,x2)&r2(x2,f)&r3(x1,f)");
  int picked = g.pick_enumeration_node();
  CHECK(g.nodes()[picked].name == "x1");

  // Removing the pick keeps the graph connected by contract.
  StructuralReport before = g.structural_report();
  CHECK_FALSE(before.acyclic);
}

TEST_CASE("pick_enumeration_node rejects acyclic graphs") {
  QueryGraph g = graph_of("r1(a0,x1)&r2(x1,f)");
  CHECK_THROWS_AS(g.pick_enumeration_node(), Error);
}

TEST_CASE("debug dump is valid JSON with the edge quadruples") {
  QueryGraph g = graph_of("r1(a0,f)");
  CHECK(g.debug_dump().find("\"edges\"") != std::string::npos);
}
