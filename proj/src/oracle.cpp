#include "efo/oracle.hpp"

#include <algorithm>
#include <map>

#include "efo/error.hpp"

namespace efo {
namespace oracle {

namespace {

struct Budget {
  std::uint64_t remaining;

  void spend() {
    if (remaining == 0) {
      raise(ErrorCode::Limit, "oracle assignment budget exceeded");
    }
    --remaining;
  }
};

using Env = std::map<std::string, EntityId>;

EntityId resolve(const Term& t, const Env& env) {
  if (t.kind == Term::Kind::Constant) return t.entity;
  auto it = env.find(t.name);
  if (it == env.end()) {
    raise(ErrorCode::Validation, "unbound variable in oracle: " + t.name);
  }
  return it->second;
}

double eval_fuzzy(const Formula& f, Env& env, const MatrixSet& matrices,
                  const Semantics& sem, bool prefer_dense, Budget& budget) {
  switch (f.op()) {
    case Formula::Op::Atom: {
      EntityId h = resolve(f.head(), env);
      EntityId t = resolve(f.tail(), env);
      if (f.relation() >= matrices.relation_count()) {
        raise(ErrorCode::Validation, "relation id out of range");
      }
      return matrices.matrix(f.relation(), prefer_dense).at(h, t);
    }
    case Formula::Op::Not:
      return 1.0 -
             eval_fuzzy(*f.lhs(), env, matrices, sem, prefer_dense, budget);
    case Formula::Op::And:
      return tnorm(sem.conjunction,
                   eval_fuzzy(*f.lhs(), env, matrices, sem, prefer_dense,
                              budget),
                   eval_fuzzy(*f.rhs(), env, matrices, sem, prefer_dense,
                              budget));
    case Formula::Op::Or:
      return tconorm(sem.disjunction,
                     eval_fuzzy(*f.lhs(), env, matrices, sem, prefer_dense,
                                budget),
                     eval_fuzzy(*f.rhs(), env, matrices, sem, prefer_dense,
                                budget));
    case Formula::Op::Exists: {
      double best = 0.0;
      for (EntityId a = 0; a < matrices.entity_count; ++a) {
        budget.spend();
        env[f.var()] = a;
        best = std::max(best, eval_fuzzy(*f.lhs(), env, matrices, sem,
                                         prefer_dense, budget));
        if (best == 1.0) break;  // max cannot grow past 1
      }
      env.erase(f.var());
      return best;
    }
  }
  raise(ErrorCode::Internal, "bad formula op");
}

bool eval_classical(const Formula& f, Env& env, const KnowledgeGraph& kg,
                    Budget& budget) {
  switch (f.op()) {
    case Formula::Op::Atom:
      return kg.contains(resolve(f.head(), env), f.relation(),
                         resolve(f.tail(), env));
    case Formula::Op::Not:
      return !eval_classical(*f.lhs(), env, kg, budget);
    case Formula::Op::And:
      return eval_classical(*f.lhs(), env, kg, budget) &&
             eval_classical(*f.rhs(), env, kg, budget);
    case Formula::Op::Or:
      return eval_classical(*f.lhs(), env, kg, budget) ||
             eval_classical(*f.rhs(), env, kg, budget);
    case Formula::Op::Exists: {
      for (EntityId a = 0; a < kg.entity_count(); ++a) {
        budget.spend();
        env[f.var()] = a;
        if (eval_classical(*f.lhs(), env, kg, budget)) {
          env.erase(f.var());
          return true;
        }
      }
      env.erase(f.var());
      return false;
    }
  }
  raise(ErrorCode::Internal, "bad formula op");
}

std::string single_free_name(const FormulaPtr& query) {
  auto frees = query->free_names();
  if (frees.size() != 1) {
    raise(ErrorCode::Validation, "oracle expects exactly one free variable");
  }
  return frees[0];
}

}  // namespace

double truth_value(const FormulaPtr& query, EntityId free,
                   const MatrixSet& matrices, const Semantics& semantics,
                   const OracleLimit& limit, bool prefer_dense) {
  Env env;
  auto frees = query->free_names();
  if (!frees.empty()) {
    if (frees.size() != 1) {
      raise(ErrorCode::Validation,
            "oracle expects a sentence or one free variable");
    }
    env[frees[0]] = free;
  }
  Budget budget{limit.max_assignments};
  return eval_fuzzy(*query, env, matrices, semantics, prefer_dense, budget);
}

FuzzyVector answer_vector_bruteforce(const FormulaPtr& query,
                                     const MatrixSet& matrices,
                                     const Semantics& semantics,
                                     const OracleLimit& limit,
                                     bool prefer_dense) {
  std::string free_name = single_free_name(query);
  FuzzyVector out(matrices.entity_count);
  Budget budget{limit.max_assignments};
  for (EntityId a = 0; a < matrices.entity_count; ++a) {
    Env env{{free_name, a}};
    out[a] =
        eval_fuzzy(*query, env, matrices, semantics, prefer_dense, budget);
  }
  return out;
}

std::set<EntityId> answer_set_symbolic(const FormulaPtr& query,
                                       const KnowledgeGraph& kg,
                                       const OracleLimit& limit) {
  std::string free_name = single_free_name(query);
  std::set<EntityId> out;
  Budget budget{limit.max_assignments};
  for (EntityId a = 0; a < kg.entity_count(); ++a) {
    Env env{{free_name, a}};
    if (eval_classical(*query, env, kg, budget)) out.insert(a);
  }
  return out;
}

namespace {

class TreeEval {
 public:
  TreeEval(const std::vector<RelationId>& relations,
           const std::vector<EntityId>& entities, const MatrixSet& matrices,
           bool prefer_dense)
      : relations_(relations),
        entities_(entities),
        matrices_(matrices),
        prefer_dense_(prefer_dense) {}

  FuzzyVector eval(const LispNode& node) {
    switch (node.tag) {
      case 'p': {
        RelationId rel = next_relation();
        const FuzzyMatrix& m = matrices_.matrix(rel, prefer_dense_);
        if (node.children[0].tag == 'e') {
          EntityId a = next_entity();
          FuzzyVector out(matrices_.entity_count);
          m.for_each_in_row(a,
                            [&](EntityId b, double v) { out[b] = v; });
          return out;
        }
        FuzzyVector sub = eval(node.children[0]);
        FuzzyVector out(matrices_.entity_count);
        for (EntityId b = 0; b < matrices_.entity_count; ++b) {
          if (sub[b] == 0.0) continue;
          m.for_each_in_row(b, [&](EntityId c, double v) {
            out[c] = std::max(out[c], sub[b] * v);
          });
        }
        return out;
      }
      case 'i':
      case 'u': {
        FuzzyVector acc = eval(node.children[0]);
        for (std::size_t k = 1; k < node.children.size(); ++k) {
          FuzzyVector next = eval(node.children[k]);
          for (EntityId b = 0; b < matrices_.entity_count; ++b) {
            acc[b] = node.tag == 'i' ? acc[b] * next[b]
                                     : std::max(acc[b], next[b]);
          }
        }
        return acc;
      }
      case 'n': {
        if (introduces_existential(node.children[0])) {
          raise(ErrorCode::NotEfo1,
                "operator tree negates an existential subtree; outside the "
                "supported fragment");
        }
        FuzzyVector sub = eval(node.children[0]);
        FuzzyVector out(matrices_.entity_count);
        for (EntityId b = 0; b < matrices_.entity_count; ++b) {
          out[b] = 1.0 - sub[b];
        }
        return out;
      }
      default:
        raise(ErrorCode::Validation, "operator tree evaluation hit an "
                                     "entity leaf outside a projection");
    }
  }

  void finish() const {
    if (rel_pos_ != relations_.size() || ent_pos_ != entities_.size()) {
      raise(ErrorCode::Validation,
            "grounding mismatch: unused relations or entities");
    }
  }

  // A projection over a non-leaf child introduces an existential variable.
  static bool introduces_existential(const LispNode& node) {
    if (node.tag == 'p' && node.children[0].tag != 'e') return true;
    for (const LispNode& child : node.children) {
      if (introduces_existential(child)) return true;
    }
    return false;
  }

 private:
  RelationId next_relation() {
    if (rel_pos_ >= relations_.size()) {
      raise(ErrorCode::Validation, "grounding mismatch: missing relation");
    }
    return relations_[rel_pos_++];
  }

  EntityId next_entity() {
    if (ent_pos_ >= entities_.size()) {
      raise(ErrorCode::Validation, "grounding mismatch: missing entity");
    }
    return entities_[ent_pos_++];
  }

  const std::vector<RelationId>& relations_;
  const std::vector<EntityId>& entities_;
  const MatrixSet& matrices_;
  bool prefer_dense_;
  std::size_t rel_pos_ = 0;
  std::size_t ent_pos_ = 0;
};

}  // namespace

FuzzyVector operator_tree_maxprod(const LispNode& tree,
                                  const std::vector<RelationId>& relations,
                                  const std::vector<EntityId>& entities,
                                  const MatrixSet& matrices) {
  bool prefer_dense =
      matrices.has_dense() && !TreeEval::introduces_existential(tree);
  TreeEval eval(relations, entities, matrices, prefer_dense);
  FuzzyVector out = eval.eval(tree);
  eval.finish();
  return out;
}

}  // namespace oracle
}  // namespace efo
