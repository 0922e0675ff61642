#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "efo/error.hpp"
#include "efo/kg.hpp"
#include "test_util.hpp"

using namespace efo;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = std::string("/tmp/efo_kg_") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("load_triples builds a dense-indexed graph") {
  auto path = write_temp("basic.tsv", "a0\tr0\ta1\na0\tr0\ta2\n");
  KnowledgeGraph kg = load_triples(path);
  CHECK(kg.entity_count() == 3);
  CHECK(kg.relation_count() == 1);
  CHECK(kg.triples().size() == 2);
  CHECK(kg.contains(0, 0, 1));
  CHECK(kg.entity_labels().label(0) == "a0");
  std::remove(path.c_str());
}

TEST_CASE("load_triples: empty file gives an empty graph") {
  auto path = write_temp("empty.tsv", "");
  KnowledgeGraph kg = load_triples(path);
  CHECK(kg.entity_count() == 0);
  CHECK(kg.triples().empty());
  std::remove(path.c_str());
}

TEST_CASE("load_triples: malformed line is an error") {
  auto path = write_temp("bad.tsv", "a0\tr0\n");
  CHECK_THROWS_WITH_AS(load_triples(path), doctest::Contains("malformed"),
                       Error);
  std::remove(path.c_str());
}

TEST_CASE("load_triples: whitespace-only lines are skipped") {
  auto path = write_temp("ws.tsv", "a0\tr0\ta1\n   \n\t\na1\tr0\ta0\n");
  KnowledgeGraph kg = load_triples(path);
  CHECK(kg.triples().size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("load_triples: unknown label under fixed maps is an error") {
  auto base = write_temp("base.tsv", "a0\tr0\ta1\n");
  KnowledgeGraph kg = load_triples(base);
  LabelMaps maps{kg.entity_labels(), kg.relation_labels()};
  auto extra = write_temp("extra.tsv", "a0\tr0\tzz\n");
  CHECK_THROWS_AS(load_triples(extra, &maps), Error);
  std::remove(base.c_str());
  std::remove(extra.c_str());
}

TEST_CASE("reverse_enrich adds transposed triples with shifted ids") {
  KnowledgeGraph kg(2, 1, {{0, 0, 1}});
  KnowledgeGraph enriched = reverse_enrich(kg);
  CHECK(enriched.relation_count() == 2);
  CHECK(enriched.triples().size() == 2);
  CHECK(enriched.contains(0, 0, 1));
  CHECK(enriched.contains(1, 1, 0));
}

TEST_CASE("reverse_enrich: empty graph doubles the relation count only") {
  KnowledgeGraph kg(3, 2, {});
  KnowledgeGraph enriched = reverse_enrich(kg);
  CHECK(enriched.relation_count() == 4);
  CHECK(enriched.triples().empty());
}

TEST_CASE("reverse_enrich: self-pair gets its mirror") {
  KnowledgeGraph kg(1, 1, {{0, 0, 0}});
  KnowledgeGraph enriched = reverse_enrich(kg);
  CHECK(enriched.triples().size() == 2);
  CHECK(enriched.contains(0, 1, 0));
}

TEST_CASE("tail_set reads one-hop neighbors") {
  KnowledgeGraph kg = test::toy_kg();
  auto tails = kg.tails(0, 0);
  CHECK(std::vector<EntityId>(tails.begin(), tails.end()) ==
        std::vector<EntityId>{1, 2});
  CHECK(kg.tails(1, 0).empty());
}

TEST_CASE("tail lookup after enrichment matches head lookup before") {
  KnowledgeGraph kg = test::toy_kg();
  KnowledgeGraph enriched = reverse_enrich(kg);
  auto rev = enriched.tails(1, static_cast<RelationId>(kg.relation_count()));
  CHECK(std::vector<EntityId>(rev.begin(), rev.end()) ==
        std::vector<EntityId>{0});
}

TEST_CASE("reverse adjacency matches forward adjacency on random graphs") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20; ++round) {
    std::size_t n = 2 + rng() % 10;
    std::size_t r = 1 + rng() % 3;
    std::vector<Triple> triples;
    for (int k = 0; k < 30; ++k) {
      triples.push_back({static_cast<EntityId>(rng() % n),
                         static_cast<RelationId>(rng() % r),
                         static_cast<EntityId>(rng() % n)});
    }
    KnowledgeGraph kg(n, r, triples);
    KnowledgeGraph enriched = reverse_enrich(kg);
    auto base = static_cast<RelationId>(r);
    for (std::size_t e = 0; e < n; ++e) {
      for (RelationId rel = 0; rel < r; ++rel) {
        auto heads = kg.heads(static_cast<EntityId>(e), rel);
        auto rev_tails = enriched.tails(static_cast<EntityId>(e),
                                        static_cast<RelationId>(rel + base));
        CHECK(std::vector<EntityId>(heads.begin(), heads.end()) ==
              std::vector<EntityId>(rev_tails.begin(), rev_tails.end()));
      }
    }
    CHECK(enriched.indexes_consistent());
  }
}

TEST_CASE("load_split rejects an observed triple missing from complete") {
  auto complete = write_temp("c.tsv", "a0\tr0\ta1\n");
  auto observed = write_temp("o.tsv", "a0\tr0\ta1\na1\tr0\ta0\n");
  CHECK_THROWS_AS(load_split(observed, complete), Error);
  std::remove(complete.c_str());
  std::remove(observed.c_str());
}

TEST_CASE("label map round-trip") {
  KnowledgeGraph kg = test::toy_kg();
  LabelMap map;
  map.intern("alpha");
  map.intern("beta");
  std::string path = "/tmp/efo_kg_labels.tsv";
  save_label_map(map, path);
  LabelMap loaded = load_label_map(path);
  CHECK(loaded.size() == 2);
  CHECK(loaded.label(1) == "beta");
  std::remove(path.c_str());
}
