#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "efo/fuzzy.hpp"
#include "efo/kg.hpp"

namespace efo {

// Row-oriented access to raw link-predictor scores: one score per candidate
// tail for a given (head, relation).
class ScoreSource {
 public:
  virtual ~ScoreSource() = default;
  virtual std::size_t entity_count() const = 0;
  virtual std::size_t relation_count() const = 0;
  virtual void scores(EntityId head, RelationId relation,
                      std::span<float> out) const = 0;
};

// Deterministic pseudo-random scores; stands in for a pretrained model in
// tests and the self-check suites.
class SyntheticScorer : public ScoreSource {
 public:
  SyntheticScorer(std::size_t entities, std::size_t relations,
                  std::uint64_t seed)
      : entities_(entities), relations_(relations), seed_(seed) {}

  std::size_t entity_count() const override { return entities_; }
  std::size_t relation_count() const override { return relations_; }
  void scores(EntityId head, RelationId relation,
              std::span<float> out) const override;

 private:
  std::size_t entities_;
  std::size_t relations_;
  std::uint64_t seed_;
};

// P_r(a,b) = 1 exactly when (a,r,b) is a triple, 0 otherwise.
MatrixSet perfect_matrices(const KnowledgeGraph& kg);

struct ConsistencyNoise {
  std::uint64_t seed = 0;
  double cap = 0.9;          // unobserved values stay in (0, cap]
  double noise_per_row = 2;  // expected spurious entries per (head, relation)
};

// Observed triples score exactly 1; a random subset of unobserved pairs gets
// values in (0, cap]; everything else is 0.
MatrixSet consistent_matrices(const KnowledgeGraph& observed,
                              const ConsistencyNoise& noise);

struct CalibrationConfig {
  enum class Mode { Train, Test, DenseTest };

  Mode mode = Mode::Test;
  double epsilon = 0.005;  // sparsity threshold (test mode)
  double delta = 0.001;    // keeps unobserved entries strictly below 1
};

// Softmax-calibrated matrices from raw scores. Per (head, relation) row the
// softmax is rescaled so observed tails average to 1, then:
//   train:      min(1, p)
//   test:       observed -> 1; p < epsilon dropped; else min(p, 1 - delta)
//   dense-test: observed -> 1; min(p, 1 - delta), nothing dropped
// When the observed graph carries twice as many relations as the score
// source, the reversed half is filled with transposes.
MatrixSet calibrate(const ScoreSource& scores, const KnowledgeGraph& observed,
                    const CalibrationConfig& cfg);

}  // namespace efo
