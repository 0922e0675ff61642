#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "efo/dnf.hpp"
#include "efo/error.hpp"
#include "efo/oracle.hpp"
#include "efo/sampler.hpp"
#include "efo/selfcheck.hpp"

using namespace efo;

namespace {

KgSplit medium_split(std::uint64_t seed) {
  selfcheck::RandomKgSpec spec;
  spec.min_entities = 16;
  spec.max_entities = 24;
  spec.min_relations = 3;
  spec.max_relations = 4;
  spec.min_density = 0.10;
  spec.max_density = 0.15;
  return selfcheck::random_split(seed, spec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("catalog covers the legacy and the new structures") {
  CHECK(structure_names().size() == 23);
  for (const char* name :
       {"1p", "2p", "3p", "2i", "3i", "pi", "ip", "2in", "3in", "inp", "pin",
        "pni", "2u", "up", "2il", "3il", "2m", "2nm", "3mp", "3pm", "im",
        "3c", "3cm"}) {
    CHECK(is_structure_name(name));
  }
  CHECK_FALSE(is_structure_name("4p"));
  CHECK(is_negative_structure("pni"));
  CHECK(is_negative_structure("2nm"));
  CHECK_FALSE(is_negative_structure("3cm"));
  for (const char* name : {"1p", "2i", "3i", "2in", "3in"}) {
    CHECK(is_existential_free_structure(name));
  }
  CHECK_FALSE(is_existential_free_structure("2p"));
}

TEST_CASE("sampled instances satisfy the split invariants") {
  KgSplit split = medium_split(11);
  for (const std::string& structure : structure_names()) {
    QuerySample s = sample(structure, split.observed, split.complete, 5);
    CHECK_FALSE(s.hard.empty());

    std::set<EntityId> easy_set(s.easy.begin(), s.easy.end());
    for (EntityId h : s.hard) CHECK_FALSE(easy_set.count(h));

    std::set<EntityId> easy_oracle =
        oracle::answer_set_symbolic(s.formula, split.observed);
    CHECK(easy_oracle == easy_set);

    std::set<EntityId> all_oracle =
        oracle::answer_set_symbolic(s.formula, split.complete);
    for (EntityId h : s.hard) CHECK(all_oracle.count(h));

    CHECK_FALSE(detect_trivial_subsentence(s.formula));
    // Structural identity: the classification matches the template family.
    auto classes = classify(s.formula);
    if (structure == "3c" || structure == "3cm") {
      CHECK(classes.count(QueryClass::Cyclic));
    }
    if (structure == "2m" || structure == "im") {
      CHECK(classes.count(QueryClass::Multigraph));
    }
    if (structure == "pni") {
      CHECK(classes.count(QueryClass::NegationNoConstant));
    }
    if (structure == "2il" || structure == "3il") {
      CHECK(classes.count(QueryClass::ExistentialLeaf));
    }
  }
}

TEST_CASE("grounded instances never contain duplicate atoms") {
  KgSplit split = medium_split(17);
  for (const std::string& structure : {std::string("2m"), std::string("3cm"),
                                       std::string("im")}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      GroundedStructure g =
          ground_structure(structure, split.complete, seed);
      auto clauses = to_dnf(g.formula);
      for (const auto& clause : clauses) {
        for (std::size_t i = 0; i < clause.literals.size(); ++i) {
          for (std::size_t j = i + 1; j < clause.literals.size(); ++j) {
            CHECK_FALSE(clause.literals[i] == clause.literals[j]);
          }
        }
      }
    }
  }
}

TEST_CASE("lisp twins reference the grounded slots") {
  KgSplit split = medium_split(23);
  GroundedStructure g = ground_structure("2m", split.complete, 3);
  LispTwin twin = lisp_twin(g);
  CHECK(twin.text == "(i,(p,(p,(e))),(p,(p,(e))))");
  REQUIRE(twin.relations.size() == 4);
  // Both branches re-use the first-hop relation.
  CHECK(twin.relations[1] == g.relations[0]);
  CHECK(twin.relations[3] == g.relations[0]);
  CHECK(twin.entities == std::vector<EntityId>{g.constants[0],
                                               g.constants[0]});
}

TEST_CASE("unknown structure names are an error") {
  KgSplit split = medium_split(29);
  CHECK_THROWS_AS(sample("4p", split.observed, split.complete, 0), Error);
}

TEST_CASE("emit_dataset is deterministic and oracle-clean") {
  KgSplit split = medium_split(31);
  EmitOptions opts;
  opts.structures = {"1p", "2p", "2il", "3c", "pni", "2u"};
  opts.count_per_structure = 3;
  opts.seed = 9;

  std::string path_a = "/tmp/efo_dataset_a.jsonl";
  std::string path_b = "/tmp/efo_dataset_b.jsonl";
  emit_dataset(opts, split.observed, split.complete, path_a);
  emit_dataset(opts, split.observed, split.complete, path_b);
  CHECK(read_file(path_a) == read_file(path_b));

  std::vector<QuerySample> loaded = load_dataset(path_a);
  CHECK(loaded.size() == 18);
  for (const QuerySample& s : loaded) {
    std::set<EntityId> easy_oracle =
        oracle::answer_set_symbolic(s.formula, split.observed);
    CHECK(std::vector<EntityId>(easy_oracle.begin(), easy_oracle.end()) ==
          s.easy);
    CHECK_FALSE(s.hard.empty());
  }

  // Sidecar metadata exists and mentions the seed.
  CHECK(read_file(path_a + ".meta.json").find("\"seed\"") !=
        std::string::npos);

  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
  std::remove((path_a + ".meta.json").c_str());
  std::remove((path_b + ".meta.json").c_str());
}

TEST_CASE("count-zero emission writes an empty file") {
  KgSplit split = medium_split(37);
  EmitOptions opts;
  opts.structures = {"1p"};
  opts.count_per_structure = 0;
  std::string path = "/tmp/efo_dataset_empty.jsonl";
  emit_dataset(opts, split.observed, split.complete, path);
  CHECK(read_file(path).empty());
  CHECK(load_dataset(path).empty());
  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());
}

TEST_CASE("require_easy yields samples with deductible answers") {
  KgSplit split = medium_split(41);
  SampleOptions opts;
  opts.require_easy = true;
  for (const std::string& structure : {std::string("2p"), std::string("2m")}) {
    QuerySample s =
        sample(structure, split.observed, split.complete, 13, opts);
    CHECK_FALSE(s.easy.empty());
    CHECK_FALSE(s.hard.empty());
  }
}
