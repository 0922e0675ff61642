#pragma once

#include <map>
#include <string>
#include <vector>

#include "efo/fit.hpp"
#include "efo/fuzzy.hpp"
#include "efo/sampler.hpp"

namespace efo {

// Filtered reciprocal rank: each target is ranked against all entities
// outside easy+hard; equal scores break by ascending entity id (lower ids
// rank above). Targets are the hard answers, or the easy answers in
// faithful mode.
double mrr_filtered(const FuzzyVector& answer, const std::vector<EntityId>& easy,
                    const std::vector<EntityId>& hard);

struct EvalOptions {
  // Rank deductible answers instead of predicted ones.
  bool faithful = false;
  // Worker cap; 0 means use EFO_FIT_THREADS or the hardware count.
  std::size_t threads = 0;
};

struct EvalReport {
  struct PerStructure {
    double mrr_percent = 0.0;
    std::size_t count = 0;
    bool negative = false;
  };
  std::map<std::string, PerStructure> structures;
  double average_positive = 0.0;
  double average_negative = 0.0;
  double average_all = 0.0;
  std::size_t failures = 0;  // samples that raised instead of scoring

  std::string to_json() const;
  std::string to_table() const;
};

EvalReport evaluate(const std::vector<QuerySample>& samples,
                    const MatrixSet& matrices, const InferenceConfig& cfg,
                    const EvalOptions& opts = {});

}  // namespace efo
