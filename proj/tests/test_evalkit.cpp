#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "efo/error.hpp"
#include "efo/evalkit.hpp"
#include "efo/matrix_builder.hpp"
#include "efo/parse.hpp"
#include "efo/selfcheck.hpp"
#include "test_util.hpp"

using namespace efo;

TEST_CASE("mrr_filtered basics") {
  // Unique top score.
  FuzzyVector v(std::vector<double>{0.1, 0.9, 0.3, 0.2});
  CHECK(mrr_filtered(v, {}, {1}) == 1.0);

  // All-equal scores: the tie rule ranks lower ids first; the sole hard
  // answer has the lowest id so it stays on top.
  FuzzyVector flat(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  CHECK(mrr_filtered(flat, {}, {0}) == 1.0);
  // With id 2, entities 0 and 1 rank above it.
  CHECK(mrr_filtered(flat, {}, {2}) == doctest::Approx(1.0 / 3.0));
  // Filtered entities never push the rank down.
  CHECK(mrr_filtered(flat, {0, 1}, {2}) == 1.0);

  CHECK_THROWS_AS(mrr_filtered(flat, {0}, {}), Error);
}

TEST_CASE("mrr_filtered is invariant under strictly increasing transforms") {
  FuzzyVector v(std::vector<double>{0.1, 0.9, 0.3, 0.2, 0.0, 0.7});
  FuzzyVector squashed(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    squashed[i] = v[i] * v[i];  // strictly increasing on [0,1]
  }
  CHECK(mrr_filtered(v, {1}, {3, 5}) == mrr_filtered(squashed, {1}, {3, 5}));
}

TEST_CASE("perfect matrices on the complete graph give an all-100 report") {
  KgSplit split = selfcheck::random_split(3);
  MatrixSet matrices = perfect_matrices(split.complete);

  std::vector<QuerySample> samples;
  for (const std::string& structure :
       {std::string("1p"), std::string("2p"), std::string("2m"),
        std::string("3c"), std::string("2u")}) {
    for (std::uint64_t k = 0; k < 3; ++k) {
      samples.push_back(
          sample(structure, split.observed, split.complete, 100 + k));
    }
  }

  InferenceConfig cfg;
  cfg.budget_m = matrices.entity_count;
  EvalOptions opts;
  opts.threads = 2;
  EvalReport report = evaluate(samples, matrices, cfg, opts);
  CHECK(report.failures == 0);
  for (const auto& [name, per] : report.structures) {
    CHECK_MESSAGE(per.mrr_percent == 100.0, name);
  }
  CHECK(report.average_all == 100.0);
}

TEST_CASE("empty dataset gives an empty report") {
  MatrixSet m = test::toy_perfect();
  EvalReport report = evaluate({}, m, InferenceConfig{});
  CHECK(report.structures.empty());
  CHECK(report.average_all == 0.0);
  CHECK(report.failures == 0);
}

TEST_CASE("reports are deterministic and well-formed") {
  KgSplit split = selfcheck::random_split(5);
  MatrixSet matrices = perfect_matrices(split.complete);
  std::vector<QuerySample> samples;
  for (std::uint64_t k = 0; k < 4; ++k) {
    samples.push_back(sample("2p", split.observed, split.complete, k));
    samples.push_back(sample("pni", split.observed, split.complete, 50 + k));
  }
  InferenceConfig cfg;
  cfg.budget_m = matrices.entity_count;

  EvalReport a = evaluate(samples, matrices, cfg);
  EvalReport b = evaluate(samples, matrices, cfg);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_table() == b.to_table());

  // pni is the negative structure here; averages split accordingly.
  CHECK(a.structures.at("pni").negative);
  CHECK_FALSE(a.structures.at("2p").negative);
  CHECK(a.average_all ==
        doctest::Approx((a.average_positive + a.average_negative) / 2.0));

  CHECK(a.to_json().find("\"averages\"") != std::string::npos);
  CHECK(a.to_table().find("avg(pos)") != std::string::npos);
}

TEST_CASE("failed samples are counted, not fatal") {
  MatrixSet m = test::toy_perfect();
  QuerySample bad;
  bad.structure = "1p";
  bad.formula_text = "r9(a0,f)";
  bad.formula = parse_efo1(bad.formula_text);
  bad.hard = {1};

  QuerySample good;
  good.structure = "1p";
  good.formula_text = "r0(a0,f)";
  good.formula = parse_efo1(good.formula_text);
  good.hard = {1, 2};

  EvalReport report = evaluate({bad, good}, m, InferenceConfig{});
  CHECK(report.failures == 1);
  CHECK(report.structures.at("1p").count == 1);
  CHECK(report.structures.at("1p").mrr_percent == 100.0);
}
