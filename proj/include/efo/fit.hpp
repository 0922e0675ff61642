#pragma once

#include <cstdint>
#include <vector>

#include "efo/dnf.hpp"
#include "efo/formula.hpp"
#include "efo/fuzzy.hpp"
#include "efo/tnorm.hpp"

namespace efo {

struct InferenceStats {
  std::uint64_t stored_entry_visits = 0;  // matrix cells touched
  std::uint64_t enumerated_candidates = 0;
};

struct InferenceConfig {
  TNormKind conjunction = TNormKind::Product;
  TNormKind disjunction = TNormKind::Godel;
  // Existential aggregation; leaf cutting is only sound when the aggregate
  // factors out of unknown subformulas, which holds for max alone. Anything
  // else is rejected.
  TNormKind existential = TNormKind::Godel;
  std::size_t budget_m = 10;      // extra non-certain enumeration candidates
  int max_enumeration_depth = 3;  // nested enumerations before giving up
  InferenceStats* stats = nullptr;

  void validate() const;
};

// Answer vector of an EFO1 query: graph reduction per conjunctive clause
// (self-loops, then constants, then leaves, then bounded enumeration on a
// cycle node), disjuncts aggregated with the configured t-conorm. Queries
// without existential variables route to the dense bank when one is loaded.
FuzzyVector answer(const FormulaPtr& query, const MatrixSet& matrices,
                   const InferenceConfig& cfg);

// Single-clause inference; exposed for tests that drive one disjunct.
FuzzyVector answer_clause(const ConjunctiveClause& clause,
                          const MatrixSet& matrices,
                          const InferenceConfig& cfg,
                          bool prefer_dense = false);

// Cross entropy of an answer vector against the true answer set; entries are
// clamped to [1e-12, 1 - 1e-12] before the logs.
double loss(const FuzzyVector& answer, const std::vector<EntityId>& truth);

}  // namespace efo
