#include "efo/selfcheck.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <set>

#include "efo/error.hpp"
#include "efo/evalkit.hpp"
#include "efo/matrix_builder.hpp"
#include "efo/oracle.hpp"
#include "efo/parse.hpp"
#include "efo/sampler.hpp"

namespace efo::selfcheck {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<std::string>& positive_structures() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const std::string& s : structure_names()) {
      if (!is_negative_structure(s)) out.push_back(s);
    }
    return out;
  }();
  return names;
}

// Tree-form structures that stay inside the fragment (pni does not).
const std::vector<std::string> kTreeFormStructures = {
    "1p", "2p", "3p", "2i", "3i", "pi", "ip",
    "2in", "3in", "inp", "pin", "2u", "up"};

struct Failure {
  SuiteResult* result;

  void record(const std::string& what) {
    ++result->failures;
    if (result->first_failure.empty()) result->first_failure = what;
  }
};

}  // namespace

KnowledgeGraph random_kg(std::uint64_t seed, const RandomKgSpec& spec) {
  std::mt19937_64 rng(mix64(seed));
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::size_t entities = pick(spec.min_entities, spec.max_entities);
  std::size_t relations = pick(spec.min_relations, spec.max_relations);
  double density = std::uniform_real_distribution<double>(
      spec.min_density, spec.max_density)(rng);

  std::bernoulli_distribution edge(density);
  std::vector<Triple> triples;
  for (std::size_t r = 0; r < relations; ++r) {
    for (std::size_t h = 0; h < entities; ++h) {
      for (std::size_t b = 0; b < entities; ++b) {
        if (edge(rng)) {
          triples.push_back({static_cast<EntityId>(h),
                             static_cast<RelationId>(r),
                             static_cast<EntityId>(b)});
        }
      }
    }
  }
  if (triples.empty()) {
    triples.push_back({0, 0, static_cast<EntityId>(entities > 1 ? 1 : 0)});
  }
  return KnowledgeGraph(entities, relations, std::move(triples));
}

KgSplit random_split(std::uint64_t seed, const RandomKgSpec& spec) {
  KnowledgeGraph complete = random_kg(seed, spec);
  std::mt19937_64 rng(mix64(seed ^ 0x5eedULL));
  std::bernoulli_distribution keep(spec.observed_keep);
  std::vector<Triple> observed;
  for (const Triple& t : complete.triples()) {
    if (keep(rng)) observed.push_back(t);
  }
  if (observed.empty() && !complete.triples().empty()) {
    observed.push_back(complete.triples().front());
  }
  return KgSplit{KnowledgeGraph(complete.entity_count(),
                                complete.relation_count(),
                                std::move(observed)),
                 std::move(complete)};
}

namespace {

// Sparse 8-entity graphs may simply not contain a parallel-edge or cycle
// motif; a structure that cannot be grounded on the drawn graph redraws a
// fresh one so every (round, structure) cell still checks a real instance.
template <typename TryOnKg>
bool ground_with_redraws(const std::string& structure,
                         const RandomKgSpec& spec, std::uint64_t cell_seed,
                         TryOnKg&& try_on_kg) {
  for (std::uint64_t redraw = 0; redraw < 40; ++redraw) {
    std::uint64_t kg_seed = mix64(cell_seed ^ (redraw * 0x9e37ULL));
    try {
      if (try_on_kg(kg_seed)) return true;
    } catch (const Error&) {
      continue;
    }
  }
  (void)structure;
  return false;
}

}  // namespace

SuiteResult perfectness_suite(std::size_t kg_count, std::uint64_t seed,
                              const RandomKgSpec& spec) {
  SuiteResult result;
  result.name = "perfectness";
  Failure fail{&result};

  for (std::size_t k = 0; k < kg_count; ++k) {
    std::size_t si = 0;
    for (const std::string& structure : structure_names()) {
      ++si;
      std::uint64_t cell_seed = mix64(seed ^ (k * 131) ^ (si * 77777));
      bool found = ground_with_redraws(
          structure, spec, cell_seed, [&](std::uint64_t kg_seed) {
            KnowledgeGraph kg = random_kg(kg_seed, spec);
            GroundedStructure grounded =
                ground_structure(structure, kg, mix64(kg_seed ^ 0xabcdULL));
            MatrixSet matrices = perfect_matrices(kg);
            std::set<EntityId> expected =
                oracle::answer_set_symbolic(grounded.formula, kg);

            for (TNormKind conj : {TNormKind::Product, TNormKind::Godel}) {
              InferenceConfig cfg;
              cfg.conjunction = conj;
              cfg.budget_m = kg.entity_count();
              ++result.checks;
              FuzzyVector got = answer(grounded.formula, matrices, cfg);
              bool ok = true;
              for (std::size_t a = 0; a < got.size(); ++a) {
                bool in = expected.count(static_cast<EntityId>(a)) > 0;
                if (got[a] != (in ? 1.0 : 0.0)) ok = false;
              }
              if (!ok) {
                fail.record("perfectness mismatch: " + structure + " conj=" +
                            tnorm_name(conj) + " kg=" + std::to_string(k) +
                            " " + print(grounded.formula));
              }
            }
            return true;
          });
      if (!found) {
        fail.record("no groundable instance of " + structure +
                    " in 40 graph draws");
      }
    }
  }
  return result;
}

SuiteResult faithfulness_suite(std::size_t kg_count, std::uint64_t seed,
                               const RandomKgSpec& spec) {
  SuiteResult result;
  result.name = "faithfulness";
  Failure fail{&result};

  for (std::size_t k = 0; k < kg_count; ++k) {
    std::size_t si = 0;
    for (const std::string& structure : positive_structures()) {
      ++si;
      std::uint64_t cell_seed = mix64(seed ^ (k * 977) ^ (si * 131071));
      bool found = ground_with_redraws(
          structure, spec, cell_seed, [&](std::uint64_t kg_seed) {
            KgSplit split = random_split(kg_seed, spec);
            SampleOptions opts;
            opts.require_easy = true;
            QuerySample s = sample(structure, split.observed, split.complete,
                                   mix64(kg_seed ^ 0xfaceULL), opts);

            ConsistencyNoise noise;
            noise.seed = mix64(kg_seed ^ 0xca90ULL);
            noise.cap = 0.9;
            MatrixSet matrices = consistent_matrices(split.observed, noise);

            InferenceConfig cfg;
            ++result.checks;
            FuzzyVector got = answer(s.formula, matrices, cfg);
            for (EntityId a : s.easy) {
              if (got[a] != 1.0) {
                fail.record("deductible answer scored " +
                            std::to_string(got[a]) + " on " + s.formula_text);
                break;
              }
            }

            EvalOptions eval_opts;
            eval_opts.faithful = true;
            eval_opts.threads = 1;
            EvalReport report =
                evaluate({s}, matrices, InferenceConfig{}, eval_opts);
            if (report.failures != 0 ||
                report.structures.at(structure).mrr_percent != 100.0) {
              fail.record("faithful-mode MRR below 100 for " + structure +
                          " on " + s.formula_text);
            }
            return true;
          });
      if (!found) {
        fail.record("no sampleable instance of " + structure +
                    " in 40 split draws");
      }
    }
  }
  return result;
}

SuiteResult qto_coincidence_suite(std::size_t instance_count,
                                  std::uint64_t seed,
                                  const RandomKgSpec& spec) {
  SuiteResult result;
  result.name = "qto-coincidence";
  Failure fail{&result};

  for (std::size_t k = 0; k < instance_count; ++k) {
    std::size_t si = 0;
    for (const std::string& structure : kTreeFormStructures) {
      ++si;
      std::uint64_t cell_seed = mix64(seed ^ (k * 613) ^ (si * 524287));
      bool found = ground_with_redraws(
          structure, spec, cell_seed, [&](std::uint64_t kg_seed) {
            KgSplit split = random_split(kg_seed, spec);
            GroundedStructure grounded = ground_structure(
                structure, split.complete, mix64(kg_seed ^ 0xbeadULL));

            SyntheticScorer scorer(split.observed.entity_count(),
                                   split.observed.relation_count(),
                                   mix64(kg_seed ^ 0x5c05eULL));
            CalibrationConfig test_cfg;
            test_cfg.mode = CalibrationConfig::Mode::Test;
            MatrixSet matrices = calibrate(scorer, split.observed, test_cfg);

            CalibrationConfig dense_cfg;
            dense_cfg.mode = CalibrationConfig::Mode::DenseTest;
            MatrixSet dense = calibrate(scorer, split.observed, dense_cfg);
            matrices.dense_relations = std::move(dense.relations);

            LispTwin twin = lisp_twin(grounded);

            InferenceConfig cfg;
            cfg.conjunction = TNormKind::Product;
            cfg.disjunction = TNormKind::Godel;
            ++result.checks;
            FuzzyVector fit_answer = answer(grounded.formula, matrices, cfg);
            FuzzyVector tree_answer = oracle::operator_tree_maxprod(
                parse_lisp_tree(twin.text), twin.relations, twin.entities,
                matrices);

            bool equal = fit_answer.size() == tree_answer.size() &&
                         std::memcmp(fit_answer.values().data(),
                                     tree_answer.values().data(),
                                     fit_answer.size() * sizeof(double)) == 0;
            if (!equal) {
              fail.record("engine/operator-tree divergence on " + structure +
                          " " + print(grounded.formula));
            }
            return true;
          });
      if (!found) {
        fail.record("no groundable instance of " + structure +
                    " in 40 graph draws");
      }
    }
  }
  return result;
}

SuiteResult negative_control(std::uint64_t seed) {
  SuiteResult result;
  result.name = "negative-control";
  Failure fail{&result};

  KnowledgeGraph kg = random_kg(mix64(seed), {});
  MatrixSet matrices = perfect_matrices(kg);
  const Triple& t = kg.triples().front();
  matrices.relations[t.relation].set(t.head, t.tail, 0.5);  // corruption

  FormulaPtr query = Formula::atom(
      t.relation, Term::constant(t.head), Term::free_var("f"));
  std::set<EntityId> expected = oracle::answer_set_symbolic(query, kg);

  InferenceConfig cfg;
  cfg.budget_m = kg.entity_count();
  FuzzyVector got = answer(query, matrices, cfg);

  ++result.checks;
  bool detected = false;
  for (std::size_t a = 0; a < got.size(); ++a) {
    bool in = expected.count(static_cast<EntityId>(a)) > 0;
    if (got[a] != (in ? 1.0 : 0.0)) detected = true;
  }
  if (!detected) {
    fail.record("corrupted matrix slipped through the perfectness check");
  }
  return result;
}

}  // namespace efo::selfcheck
