#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efo/fit.hpp"
#include "efo/kg.hpp"

namespace efo::selfcheck {

struct RandomKgSpec {
  std::size_t min_entities = 8;
  std::size_t max_entities = 30;
  std::size_t min_relations = 2;
  std::size_t max_relations = 4;
  double min_density = 0.05;
  double max_density = 0.15;
  double observed_keep = 0.8;  // triple keep probability for the split
};

KnowledgeGraph random_kg(std::uint64_t seed, const RandomKgSpec& spec = {});
KgSplit random_split(std::uint64_t seed, const RandomKgSpec& spec = {});

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && checks > 0; }
};

// Answer vectors from perfect matrices must be exactly binary with support
// equal to the symbolic answer set, across every structure and both
// conjunction choices.
SuiteResult perfectness_suite(std::size_t kg_count, std::uint64_t seed,
                              const RandomKgSpec& spec = {});

// With consistent matrices every deductible answer of every negation-free
// structure scores exactly 1, and deductible-mode MRR is exactly 100.
SuiteResult faithfulness_suite(std::size_t kg_count, std::uint64_t seed,
                               const RandomKgSpec& spec = {});

// On tree-form structures inside the fragment, the engine must equal the
// operator-tree max-product evaluation bitwise on calibrated matrices.
SuiteResult qto_coincidence_suite(std::size_t instance_count,
                                  std::uint64_t seed,
                                  const RandomKgSpec& spec = {});

// Corrupts one matrix entry and confirms the perfectness check notices.
SuiteResult negative_control(std::uint64_t seed);

}  // namespace efo::selfcheck
