#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "efo/formula.hpp"
#include "efo/fuzzy.hpp"
#include "efo/kg.hpp"
#include "efo/parse.hpp"
#include "efo/tnorm.hpp"

namespace efo {

// Deliberately naive evaluators used as ground truth. Exponential in the
// number of variables, guarded by an assignment budget so accidental blowups
// fail loudly instead of hanging.
namespace oracle {

struct OracleLimit {
  std::uint64_t max_assignments = 10'000'000;
};

struct Semantics {
  TNormKind conjunction = TNormKind::Product;
  TNormKind disjunction = TNormKind::Godel;
  // Existential aggregation is Godel (max) throughout.
};

// Exact recursive truth value with the free variable substituted by `free`.
double truth_value(const FormulaPtr& query, EntityId free,
                   const MatrixSet& matrices, const Semantics& semantics,
                   const OracleLimit& limit = {}, bool prefer_dense = false);

// truth_value for every substitution of the free variable.
FuzzyVector answer_vector_bruteforce(const FormulaPtr& query,
                                     const MatrixSet& matrices,
                                     const Semantics& semantics,
                                     const OracleLimit& limit = {},
                                     bool prefer_dense = false);

// Classical two-valued evaluation: an atom holds iff its triple is in the
// graph.
std::set<EntityId> answer_set_symbolic(const FormulaPtr& query,
                                       const KnowledgeGraph& kg,
                                       const OracleLimit& limit = {});

// Independent bottom-up operator-tree evaluation with max-product
// projection, product intersection, max union and 1-v complement. Rejects
// trees whose negation covers an existential subtree (outside the fragment).
FuzzyVector operator_tree_maxprod(const LispNode& tree,
                                  const std::vector<RelationId>& relations,
                                  const std::vector<EntityId>& entities,
                                  const MatrixSet& matrices);

}  // namespace oracle
}  // namespace efo
