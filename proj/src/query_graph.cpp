#include "efo/query_graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "efo/error.hpp"

#include <nlohmann/json.hpp>

namespace efo {

namespace {

// Undirected adjacency with parallel edges collapsed and self-loops dropped.
std::vector<std::set<int>> collapsed_adjacency(
    const std::vector<QueryNode>& nodes, const std::vector<QueryEdge>& edges) {
  std::vector<std::set<int>> adj(nodes.size());
  for (const QueryEdge& e : edges) {
    if (e.head == e.tail) continue;
    adj[e.head].insert(e.tail);
    adj[e.tail].insert(e.head);
  }
  return adj;
}

std::size_t reachable_count(const std::vector<std::set<int>>& adj, int start,
                            int skip) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    ++count;
    for (int v : adj[u]) {
      if (v == skip || seen[v]) continue;
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  return count;
}

bool connected_without(const std::vector<std::set<int>>& adj, int skip) {
  int start = -1;
  std::size_t expected = 0;
  for (int i = 0; i < static_cast<int>(adj.size()); ++i) {
    if (i == skip) continue;
    ++expected;
    if (start < 0) start = i;
  }
  if (start < 0) return true;
  return reachable_count(adj, start, skip) == expected;
}

}  // namespace

QueryGraph QueryGraph::from_clause(const ConjunctiveClause& clause) {
  QueryGraph g;
  std::map<EntityId, int> constant_index;
  std::map<std::string, int> var_index;

  auto node_for = [&](const Term& t) -> int {
    if (t.kind == Term::Kind::Constant) {
      auto it = constant_index.find(t.entity);
      if (it != constant_index.end()) return it->second;
      int idx = static_cast<int>(g.nodes_.size());
      g.nodes_.push_back({QueryNode::Kind::Constant, t.entity, {}});
      constant_index.emplace(t.entity, idx);
      return idx;
    }
    auto it = var_index.find(t.name);
    if (it != var_index.end()) return it->second;
    int idx = static_cast<int>(g.nodes_.size());
    g.nodes_.push_back({t.kind == Term::Kind::FreeVar
                            ? QueryNode::Kind::Free
                            : QueryNode::Kind::Existential,
                        0, t.name});
    var_index.emplace(t.name, idx);
    return idx;
  };

  for (const Literal& lit : clause.literals) {
    int h = node_for(lit.head);
    int t = node_for(lit.tail);
    if (h == t && g.nodes_[h].kind == QueryNode::Kind::Constant) {
      raise(ErrorCode::ConstantSelfLoop,
            "self-loop on a constant entity has no meaning in a query graph");
    }
    g.edges_.push_back({h, lit.relation, t, lit.positive});
  }

  auto free_it = var_index.find(clause.free_var);
  if (free_it == var_index.end()) {
    raise(ErrorCode::TrivialSubsentence,
          "clause never mentions the free variable");
  }
  g.free_node_ = free_it->second;

  auto adj = collapsed_adjacency(g.nodes_, g.edges_);
  if (reachable_count(adj, g.free_node_, -1) != g.nodes_.size()) {
    raise(ErrorCode::DisconnectedClause,
          "clause graph is disconnected; the component without the free "
          "variable is a sentence");
  }

  // Variables must stay connected once every constant is cut away;
  // otherwise some existential branch closes over no free variable and the
  // clause hides a sentence.
  std::vector<std::set<int>> var_adj(g.nodes_.size());
  std::size_t var_count = 0;
  for (int i = 0; i < static_cast<int>(g.nodes_.size()); ++i) {
    var_count += g.nodes_[i].kind != QueryNode::Kind::Constant;
  }
  for (const QueryEdge& e : g.edges_) {
    if (e.head == e.tail) continue;
    if (g.nodes_[e.head].kind == QueryNode::Kind::Constant ||
        g.nodes_[e.tail].kind == QueryNode::Kind::Constant) {
      continue;
    }
    var_adj[e.head].insert(e.tail);
    var_adj[e.tail].insert(e.head);
  }
  if (reachable_count(var_adj, g.free_node_, -1) != var_count) {
    raise(ErrorCode::TrivialSubsentence,
          "existential variables are connected to the free variable only "
          "through constants; the separated branch is a sentence");
  }
  return g;
}

StructuralReport QueryGraph::structural_report() const {
  StructuralReport report;
  auto adj = collapsed_adjacency(nodes_, edges_);

  // Parallel edges (either direction) or self-loops break simplicity.
  std::map<std::pair<int, int>, int> pair_count;
  for (const QueryEdge& e : edges_) {
    if (e.head == e.tail) {
      if (std::find(report.self_loops.begin(), report.self_loops.end(),
                    e.head) == report.self_loops.end()) {
        report.self_loops.push_back(e.head);
      }
      report.simple = false;
      continue;
    }
    auto key = std::minmax(e.head, e.tail);
    if (++pair_count[{key.first, key.second}] > 1) report.simple = false;
  }

  // Cycle test on the collapsed graph: connected and acyclic iff #edges =
  // #nodes - 1.
  std::size_t collapsed_edges = pair_count.size();
  report.acyclic = collapsed_edges + 1 == nodes_.size();

  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (adj[i].size() == 1) report.leaves.push_back(i);
  }

  for (const QueryEdge& e : edges_) {
    if (!e.positive &&
        nodes_[e.head].kind != QueryNode::Kind::Constant &&
        nodes_[e.tail].kind != QueryNode::Kind::Constant) {
      report.property1 = true;
    }
  }

  // An existential node can be a spanning-tree leaf iff it is not a cut
  // vertex of the collapsed graph.
  if (nodes_.size() >= 2) {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      if (nodes_[i].kind != QueryNode::Kind::Existential) continue;
      if (connected_without(adj, i)) {
        report.property2 = true;
        break;
      }
    }
  }
  return report;
}

int QueryGraph::pick_enumeration_node() const {
  StructuralReport report = structural_report();
  if (report.acyclic) {
    raise(ErrorCode::Validation,
          "enumeration requires a cyclic residual graph");
  }
  if (!report.leaves.empty() || !report.self_loops.empty()) {
    raise(ErrorCode::Validation,
          "enumeration requires leaves and self-loops to be processed first");
  }

  auto adj = collapsed_adjacency(nodes_, edges_);
  std::vector<int> incident(nodes_.size(), 0);
  for (const QueryEdge& e : edges_) {
    ++incident[e.head];
    if (e.head != e.tail) ++incident[e.tail];
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (i == free_node_) continue;
    if (!connected_without(adj, i)) continue;
    if (best < 0 || incident[i] < incident[best]) best = i;
  }
  if (best < 0) {
    raise(ErrorCode::Validation,
          "no enumerable node: only the free variable keeps the graph "
          "connected");
  }
  return best;
}

std::string QueryGraph::debug_dump() const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const QueryNode& n : nodes_) {
    switch (n.kind) {
      case QueryNode::Kind::Constant:
        j["nodes"].push_back("a" + std::to_string(n.entity));
        break;
      case QueryNode::Kind::Existential:
      case QueryNode::Kind::Free:
        j["nodes"].push_back(n.name);
        break;
    }
  }
  j["edges"] = nlohmann::json::array();
  for (const QueryEdge& e : edges_) {
    j["edges"].push_back({e.head, e.relation, e.tail, e.positive});
  }
  return j.dump();
}

}  // namespace efo
