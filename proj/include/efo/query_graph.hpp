#pragma once

#include <string>
#include <vector>

#include "efo/formula.hpp"

namespace efo {

struct QueryNode {
  enum class Kind { Constant, Existential, Free };

  Kind kind = Kind::Constant;
  EntityId entity = 0;  // Constant only
  std::string name;     // variables only

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

struct QueryEdge {
  int head = 0;  // node index
  RelationId relation = 0;
  int tail = 0;
  bool positive = true;

  friend bool operator==(const QueryEdge&, const QueryEdge&) = default;
};

struct StructuralReport {
  bool acyclic = true;
  bool simple = true;
  std::vector<int> self_loops;  // nodes carrying self-loop edges
  std::vector<int> leaves;      // collapsed degree 1
  bool property1 = false;       // negated edge between two non-constants
  bool property2 = false;       // some rooted spanning tree has an
                                // existential leaf
};

// Multigraph form of one conjunctive clause: one node per distinct term,
// one signed edge per literal. Immutable once built.
class QueryGraph {
 public:
  // Rejects disconnected clauses (a component without the free variable is a
  // sentence) and self-loops on constant nodes.
  static QueryGraph from_clause(const ConjunctiveClause& clause);

  const std::vector<QueryNode>& nodes() const { return nodes_; }
  const std::vector<QueryEdge>& edges() const { return edges_; }
  int free_node() const { return free_node_; }

  StructuralReport structural_report() const;

  // A non-free node whose removal keeps the graph connected; ties broken by
  // fewest incident edges, then smallest index. Requires a cyclic residual
  // graph (no leaf, no constant, no self-loop left to process).
  int pick_enumeration_node() const;

  std::string debug_dump() const;  // JSON {nodes, edges}

 private:
  std::vector<QueryNode> nodes_;
  std::vector<QueryEdge> edges_;
  int free_node_ = -1;
};

}  // namespace efo
