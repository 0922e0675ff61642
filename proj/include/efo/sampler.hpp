#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efo/formula.hpp"
#include "efo/kg.hpp"

namespace efo {

// A grounded query instance plus its answer split: easy answers are
// derivable from the observed graph alone, hard answers only from the
// complete graph.
struct QuerySample {
  std::string structure;
  std::string formula_text;
  FormulaPtr formula;
  std::vector<EntityId> easy;  // sorted
  std::vector<EntityId> hard;  // sorted, never empty when sampled

  // Operator-tree twin of the instance (the closest tree-form
  // approximation), kept alongside so divergence can be measured.
  std::string lisp;
  std::vector<RelationId> lisp_relations;
  std::vector<EntityId> lisp_entities;
};

// All supported structure names: the fourteen legacy tree-form shapes plus
// the ten multigraph/cyclic/leaf shapes (pni appears once; both families
// define it identically here).
const std::vector<std::string>& structure_names();
bool is_structure_name(const std::string& name);
// True when the structure contains a negated atom.
bool is_negative_structure(const std::string& name);
// True when the structure has no existential variable (dense-row eligible).
bool is_existential_free_structure(const std::string& name);

// Relation/constant slot values for one grounded instance.
struct GroundedStructure {
  std::string structure;
  FormulaPtr formula;
  std::vector<RelationId> relations;
  std::vector<EntityId> constants;
};

// Witness-guided grounding on a single graph: the instance is satisfiable by
// construction. Throws after max_attempts rejections.
GroundedStructure ground_structure(const std::string& structure,
                                   const KnowledgeGraph& kg,
                                   std::uint64_t seed,
                                   std::size_t max_attempts = 500);

struct LispTwin {
  std::string text;
  std::vector<RelationId> relations;
  std::vector<EntityId> entities;
};
LispTwin lisp_twin(const GroundedStructure& grounded);

struct SampleOptions {
  std::size_t max_attempts = 500;
  bool require_easy = false;
};

QuerySample sample(const std::string& structure,
                   const KnowledgeGraph& observed,
                   const KnowledgeGraph& complete, std::uint64_t seed,
                   const SampleOptions& opts = {});

struct EmitOptions {
  std::vector<std::string> structures;  // empty = all
  std::size_t count_per_structure = 10;
  std::uint64_t seed = 0;
  SampleOptions sample;
  // Recorded in the sidecar metadata only.
  std::string observed_path;
  std::string complete_path;
};

// JSONL, one sample per line, plus a `<path>.meta.json` sidecar. Every
// sample re-validates against the oracle before it is written.
void emit_dataset(const EmitOptions& opts, const KnowledgeGraph& observed,
                  const KnowledgeGraph& complete, const std::string& path);

std::vector<QuerySample> load_dataset(const std::string& path);

}  // namespace efo
