#include "efo/fit.hpp"

#include <algorithm>
#include <cmath>

#include "efo/error.hpp"
#include "efo/query_graph.hpp"

namespace efo {

void InferenceConfig::validate() const {
  if (existential != TNormKind::Godel) {
    raise(ErrorCode::Config,
          "existential aggregation must be godel (max): cutting a leaf "
          "requires max_b [w(b) T t] = (max_b w(b)) T t, which fails for "
          "other t-conorms");
  }
  if (max_enumeration_depth < 1) {
    raise(ErrorCode::Config, "max_enumeration_depth must be at least 1");
  }
}

namespace {

struct EdgeTerm {
  RelationId relation;
  bool src_is_head;  // matrix row index is the source side
  bool positive;
};

class ClauseRun {
 public:
  ClauseRun(const ConjunctiveClause& clause, const MatrixSet& matrices,
            const InferenceConfig& cfg, bool prefer_dense)
      : matrices_(matrices), cfg_(cfg), prefer_dense_(prefer_dense) {
    QueryGraph g = QueryGraph::from_clause(clause);
    nodes_ = g.nodes();
    edges_ = g.edges();
    node_alive_.assign(nodes_.size(), true);
    edge_alive_.assign(edges_.size(), true);
    candidates_.resize(nodes_.size());
    const std::size_t n = matrices_.entity_count;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].kind != QueryNode::Kind::Constant) {
        candidates_[i] = FuzzyVector::ones(n);
      }
    }
  }

  FuzzyVector run() { return fitc(0); }

 private:
  const FuzzyMatrix& matrix(RelationId r) const {
    if (r >= matrices_.relation_count()) {
      raise(ErrorCode::Validation,
            "relation id out of range: r" + std::to_string(r));
    }
    return matrices_.matrix(r, prefer_dense_);
  }

  void count_visits(std::uint64_t n) const {
    if (cfg_.stats) cfg_.stats->stored_entry_visits += n;
  }

  double conj(double a, double b) const {
    return tnorm(cfg_.conjunction, a, b);
  }

  std::size_t entity_count() const { return matrices_.entity_count; }

  // ---- structural queries on the live residual graph ----

  std::size_t alive_nodes() const {
    return std::count(node_alive_.begin(), node_alive_.end(), true);
  }

  int other_end(const QueryEdge& e, int node) const {
    return e.head == node ? e.tail : e.head;
  }

  std::vector<int> distinct_neighbors(int node) const {
    std::vector<int> out;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k]) continue;
      const QueryEdge& e = edges_[k];
      if (e.head != node && e.tail != node) continue;
      if (e.head == e.tail) continue;
      int o = other_end(e, node);
      if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    }
    return out;
  }

  // ---- step: self loops ----

  bool remove_self_loops() {
    bool any = false;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k] || edges_[k].head != edges_[k].tail) continue;
      const QueryEdge& e = edges_[k];
      int u = e.head;
      if (nodes_[u].kind == QueryNode::Kind::Constant) {
        raise(ErrorCode::Internal, "self-loop on a constant survived build");
      }
      const FuzzyMatrix& m = matrix(e.relation);
      FuzzyVector& c = candidates_[u];
      const std::size_t n = entity_count();
      if (e.positive) {
        for (std::size_t i = 0; i < n; ++i) {
          c[i] = c[i] == 0.0 ? 0.0 : conj(c[i], m.at(i, i));
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          c[i] = conj(c[i], 1.0 - m.at(i, i));
        }
      }
      count_visits(n);
      edge_alive_[k] = false;
      any = true;
    }
    return any;
  }

  // ---- step: constant removal ----

  int first_alive_constant() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (node_alive_[i] && nodes_[i].kind == QueryNode::Kind::Constant) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  void remove_constant(int cnode) {
    EntityId a = nodes_[cnode].entity;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k]) continue;
      const QueryEdge& e = edges_[k];
      if (e.head != cnode && e.tail != cnode) continue;
      int v = other_end(e, cnode);
      if (nodes_[v].kind == QueryNode::Kind::Constant) {
        raise(ErrorCode::Internal,
              "edge between two constants survived the triviality checks");
      }
      const FuzzyMatrix& m = matrix(e.relation);
      FuzzyVector& c = candidates_[v];
      const std::size_t n = entity_count();
      bool constant_is_head = e.head == cnode;
      if (e.positive) {
        if (constant_is_head) {
          // c ⊙ row a: absent columns force 0.
          FuzzyVector next(n);
          m.for_each_in_row(a, [&](EntityId j, double p) {
            next[j] = conj(c[j], p);
          });
          count_visits(m.row_nnz(a));
          c = std::move(next);
        } else {
          // c ⊙ column a, read through per-row lookups on the support.
          std::uint64_t looked = 0;
          for (std::size_t i = 0; i < n; ++i) {
            if (c[i] == 0.0) continue;
            ++looked;
            double p = m.at(static_cast<EntityId>(i), a);
            c[i] = p == 0.0 ? 0.0 : conj(c[i], p);
          }
          count_visits(looked);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          double p = constant_is_head ? m.at(a, static_cast<EntityId>(i))
                                      : m.at(static_cast<EntityId>(i), a);
          c[i] = conj(c[i], 1.0 - p);
        }
        count_visits(n);
      }
      edge_alive_[k] = false;
    }
    node_alive_[cnode] = false;
  }

  // ---- step: leaf cutting ----

  // m(t) = max_s [src(s) T (fold of edge terms at (s,t))], the max-exchange
  // reduction that eliminates the source node.
  FuzzyVector reduce_source(const FuzzyVector& src,
                            const std::vector<std::pair<const QueryEdge*,
                                                        bool>>& edge_dirs)
      const {
    const std::size_t n = entity_count();
    FuzzyVector out(n);

    if (edge_dirs.size() == 1 && edge_dirs[0].first->positive) {
      const QueryEdge& e = *edge_dirs[0].first;
      bool src_is_head = edge_dirs[0].second;
      const FuzzyMatrix& m = matrix(e.relation);
      if (src_is_head) {
        for (std::size_t s = 0; s < n; ++s) {
          if (src[s] == 0.0) continue;
          m.for_each_in_row(static_cast<EntityId>(s),
                            [&](EntityId t, double p) {
                              out[t] = std::max(out[t], conj(src[s], p));
                            });
          count_visits(m.row_nnz(static_cast<EntityId>(s)));
        }
      } else {
        for (std::size_t t = 0; t < n; ++t) {
          double best = 0.0;
          m.for_each_in_row(static_cast<EntityId>(t),
                            [&](EntityId s, double p) {
                              if (src[s] != 0.0) {
                                best = std::max(best, conj(src[s], p));
                              }
                            });
          count_visits(m.row_nnz(static_cast<EntityId>(t)));
          out[t] = best;
        }
      }
      return out;
    }

    // General path: parallel and/or negated edges, one dense pass per live
    // source value.
    for (std::size_t s = 0; s < n; ++s) {
      if (src[s] == 0.0) continue;
      for (std::size_t t = 0; t < n; ++t) {
        double acc = src[s];
        for (const auto& [edge, src_is_head] : edge_dirs) {
          if (acc == 0.0) break;
          const FuzzyMatrix& m = matrix(edge->relation);
          double p = src_is_head ? m.at(static_cast<EntityId>(s),
                                        static_cast<EntityId>(t))
                                 : m.at(static_cast<EntityId>(t),
                                        static_cast<EntityId>(s));
          if (!edge->positive) p = 1.0 - p;
          acc = conj(acc, p);
        }
        out[t] = std::max(out[t], acc);
      }
      count_visits(n * edge_dirs.size());
    }
    return out;
  }

  std::vector<std::pair<const QueryEdge*, bool>> edges_between(int src,
                                                               int dst) const {
    std::vector<std::pair<const QueryEdge*, bool>> out;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k]) continue;
      const QueryEdge& e = edges_[k];
      if ((e.head == src && e.tail == dst) ||
          (e.head == dst && e.tail == src)) {
        out.emplace_back(&e, e.head == src);
      }
    }
    return out;
  }

  void kill_edges_between(int a, int b) {
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k]) continue;
      const QueryEdge& e = edges_[k];
      if ((e.head == a && e.tail == b) || (e.head == b && e.tail == a)) {
        edge_alive_[k] = false;
      }
    }
  }

  int smallest_leaf() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!node_alive_[i]) continue;
      if (distinct_neighbors(static_cast<int>(i)).size() == 1) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  // ---- step: enumeration ----

  FuzzyVector enumerate(int depth) {
    if (depth >= cfg_.max_enumeration_depth) {
      raise(ErrorCode::Limit,
            "enumeration depth cap reached (" +
                std::to_string(cfg_.max_enumeration_depth) +
                "); the query graph has too many independent cycles");
    }

    int u = pick_live_enumeration_node();
    const FuzzyVector cu = candidates_[u];

    std::vector<std::pair<double, EntityId>> cands;
    std::size_t certain = 0;
    for (std::size_t a = 0; a < cu.size(); ++a) {
      if (cu[a] > 0.0) cands.emplace_back(cu[a], static_cast<EntityId>(a));
      if (cu[a] == 1.0) ++certain;
    }
    std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    std::size_t budget = certain + cfg_.budget_m;
    if (cands.size() > budget) cands.resize(budget);

    FuzzyVector result(entity_count());
    for (const auto& [value, a] : cands) {
      if (cfg_.stats) ++cfg_.stats->enumerated_candidates;
      ClauseRun branch(*this);
      branch.nodes_[u] = {QueryNode::Kind::Constant, a, {}};
      branch.candidates_[u] = FuzzyVector();
      FuzzyVector sub = branch.fitc(depth + 1);
      for (std::size_t i = 0; i < result.size(); ++i) {
        result[i] = std::max(result[i], conj(sub[i], value));
      }
    }
    return result;
  }

  int pick_live_enumeration_node() const {
    // Rebuild the live residual graph so the shared selection logic (and its
    // contract) applies.
    ConjunctiveClause residual;
    residual.free_var = "f";
    std::vector<Term> terms;
    int next_var = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!node_alive_[i]) {
        terms.emplace_back();
        continue;
      }
      switch (nodes_[i].kind) {
        case QueryNode::Kind::Constant:
          terms.push_back(Term::constant(nodes_[i].entity));
          break;
        case QueryNode::Kind::Free:
          terms.push_back(Term::free_var("f"));
          break;
        case QueryNode::Kind::Existential:
          terms.push_back(Term::exist_var("x" + std::to_string(next_var++)));
          break;
      }
    }
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      if (!edge_alive_[k]) continue;
      residual.literals.push_back(Literal{edges_[k].relation,
                                          terms[edges_[k].head],
                                          terms[edges_[k].tail],
                                          edges_[k].positive});
    }
    QueryGraph g = QueryGraph::from_clause(residual);
    int picked = g.pick_enumeration_node();
    // Map the picked node (indexed by first appearance in residual literal
    // order) back to the live node id.
    const QueryNode& pn = g.nodes()[picked];
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!node_alive_[i]) continue;
      if (pn.kind != nodes_[i].kind) continue;
      if (pn.kind == QueryNode::Kind::Constant) {
        if (pn.entity == nodes_[i].entity) return static_cast<int>(i);
      } else if (pn.name == terms[i].name) {
        return static_cast<int>(i);
      }
    }
    raise(ErrorCode::Internal, "enumeration node mapping failed");
  }

  // ---- the dispatch loop ----

  FuzzyVector fitc(int depth) {
    for (;;) {
      if (alive_nodes() == 1) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
          if (node_alive_[i]) {
            if (nodes_[i].kind != QueryNode::Kind::Free) {
              raise(ErrorCode::Internal, "terminal node is not free");
            }
            return candidates_[i];
          }
        }
        raise(ErrorCode::Internal, "live node bookkeeping is inconsistent");
      }

      if (remove_self_loops()) continue;

      int cnode = first_alive_constant();
      if (cnode >= 0) {
        remove_constant(cnode);
        continue;
      }

      int leaf = smallest_leaf();
      if (leaf >= 0) {
        int v = distinct_neighbors(leaf)[0];
        if (nodes_[leaf].kind == QueryNode::Kind::Free) {
          // Free leaf: answer the subquery rooted at the neighbor, then pull
          // it across the connecting edges.
          FuzzyVector c_free = std::move(candidates_[leaf]);
          auto edge_dirs = edges_between(v, leaf);  // source side is v
          kill_edges_between(leaf, v);
          node_alive_[leaf] = false;
          nodes_[v].kind = QueryNode::Kind::Free;
          FuzzyVector sub = fitc(depth);
          FuzzyVector pulled = reduce_source(sub, edge_dirs);
          return vec_combine(cfg_.conjunction, c_free, pulled);
        }
        auto edge_dirs = edges_between(leaf, v);  // source side is the leaf
        FuzzyVector reduced = reduce_source(candidates_[leaf], edge_dirs);
        candidates_[v] = vec_combine(cfg_.conjunction, candidates_[v],
                                     reduced);
        kill_edges_between(leaf, v);
        node_alive_[leaf] = false;
        candidates_[leaf] = FuzzyVector();
        continue;
      }

      return enumerate(depth);
    }
  }

  const MatrixSet& matrices_;
  const InferenceConfig& cfg_;
  bool prefer_dense_;

  std::vector<QueryNode> nodes_;
  std::vector<QueryEdge> edges_;
  std::vector<char> node_alive_;
  std::vector<char> edge_alive_;
  std::vector<FuzzyVector> candidates_;
};

void check_ids(const ConjunctiveClause& clause, const MatrixSet& matrices) {
  for (const Literal& lit : clause.literals) {
    if (lit.relation >= matrices.relation_count()) {
      raise(ErrorCode::Validation,
            "relation id out of range: r" + std::to_string(lit.relation));
    }
    for (const Term* t : {&lit.head, &lit.tail}) {
      if (t->kind == Term::Kind::Constant &&
          t->entity >= matrices.entity_count) {
        raise(ErrorCode::Validation,
              "entity id out of range: a" + std::to_string(t->entity));
      }
    }
  }
}

}  // namespace

FuzzyVector answer_clause(const ConjunctiveClause& clause,
                          const MatrixSet& matrices,
                          const InferenceConfig& cfg, bool prefer_dense) {
  cfg.validate();
  check_ids(clause, matrices);
  ClauseRun run(clause, matrices, cfg, prefer_dense);
  return run.run();
}

FuzzyVector answer(const FormulaPtr& query, const MatrixSet& matrices,
                   const InferenceConfig& cfg) {
  cfg.validate();
  if (detect_trivial_subsentence(query)) {
    raise(ErrorCode::TrivialSubsentence,
          "query contains a sentence subformula and is trivial");
  }
  std::vector<ConjunctiveClause> clauses = to_dnf(query);

  bool prefer_dense = matrices.has_dense();
  for (const ConjunctiveClause& clause : clauses) {
    if (clause.has_existential()) prefer_dense = false;
  }

  FuzzyVector acc;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    FuzzyVector v = answer_clause(clauses[i], matrices, cfg, prefer_dense);
    if (i == 0) {
      acc = std::move(v);
    } else {
      for (std::size_t j = 0; j < acc.size(); ++j) {
        acc[j] = tconorm(cfg.disjunction, acc[j], v[j]);
      }
    }
  }
  return acc;
}

double loss(const FuzzyVector& answer, const std::vector<EntityId>& truth) {
  constexpr double kEps = 1e-12;
  std::vector<char> is_answer(answer.size(), 0);
  for (EntityId a : truth) is_answer.at(a) = 1;
  double total = 0.0;
  for (std::size_t i = 0; i < answer.size(); ++i) {
    double p = std::clamp(answer[i], kEps, 1.0 - kEps);
    total -= is_answer[i] ? std::log(p) : std::log(1.0 - p);
  }
  return total;
}

}  // namespace efo
