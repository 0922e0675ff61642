#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace efo {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Label <-> dense id tables for one vocabulary (entities or relations).
class LabelMap {
 public:
  // Returns the existing id or assigns the next free one.
  std::uint32_t intern(const std::string& label);
  std::optional<std::uint32_t> lookup(const std::string& label) const;
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Immutable after construction; all queries are read-only and safe to call
// from concurrent workers.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(std::size_t entity_count, std::size_t relation_count,
                 std::vector<Triple> triples, LabelMap entity_labels = {},
                 LabelMap relation_labels = {});

  std::size_t entity_count() const { return entity_count_; }
  std::size_t relation_count() const { return relation_count_; }
  const std::vector<Triple>& triples() const { return triples_; }

  bool contains(EntityId head, RelationId relation, EntityId tail) const;

  // Tails b with (head, relation, b) in the graph, sorted ascending.
  std::span<const EntityId> tails(EntityId head, RelationId relation) const;
  // Heads a with (a, relation, tail) in the graph, sorted ascending.
  std::span<const EntityId> heads(EntityId tail, RelationId relation) const;

  struct Neighbor {
    RelationId relation;
    EntityId entity;
  };
  // All (r, b) with (e, r, b) in the graph.
  std::span<const Neighbor> out_edges(EntityId e) const;
  // All (r, a) with (a, r, e) in the graph.
  std::span<const Neighbor> in_edges(EntityId e) const;

  const LabelMap& entity_labels() const { return entity_labels_; }
  const LabelMap& relation_labels() const { return relation_labels_; }

  // Rebuilds the adjacency indexes from the triple set and compares; used by
  // consistency tests.
  bool indexes_consistent() const;

 private:
  void build_indexes();

  std::size_t entity_count_ = 0;
  std::size_t relation_count_ = 0;
  std::vector<Triple> triples_;  // sorted, duplicate-free
  LabelMap entity_labels_;
  LabelMap relation_labels_;

  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_head_rel_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_tail_rel_;
  std::vector<std::vector<Neighbor>> out_edges_;
  std::vector<std::vector<Neighbor>> in_edges_;
};

struct LabelMaps {
  LabelMap entities;
  LabelMap relations;
};

// Reads `head<TAB>relation<TAB>tail` lines. With fixed maps, unknown labels
// are an error; otherwise fresh ids are assigned in order of appearance.
KnowledgeGraph load_triples(const std::string& path,
                            const LabelMaps* fixed_maps = nullptr);

// One `label<TAB>id` per line.
LabelMap load_label_map(const std::string& path);
void save_label_map(const LabelMap& map, const std::string& path);

// Adds (b, r + |R|, a) for every (a, r, b); relation count doubles and
// rev(r) = r + |R|.
KnowledgeGraph reverse_enrich(const KnowledgeGraph& kg);

struct KgSplit {
  KnowledgeGraph observed;
  KnowledgeGraph complete;
};

// Loads both splits over a shared vocabulary; every observed triple must be
// present in the complete graph or loading fails.
KgSplit load_split(const std::string& observed_path,
                   const std::string& complete_path);

}  // namespace efo
