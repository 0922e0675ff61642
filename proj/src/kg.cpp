#include "efo/kg.hpp"

#include <algorithm>
#include <fstream>

#include "efo/error.hpp"

namespace efo {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::uint32_t LabelMap::intern(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  return id;
}

std::optional<std::uint32_t> LabelMap::lookup(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph::KnowledgeGraph(std::size_t entity_count,
                               std::size_t relation_count,
                               std::vector<Triple> triples,
                               LabelMap entity_labels, LabelMap relation_labels)
    : entity_count_(entity_count),
      relation_count_(relation_count),
      triples_(std::move(triples)),
      entity_labels_(std::move(entity_labels)),
      relation_labels_(std::move(relation_labels)) {
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()),
                 triples_.end());
  for (const Triple& t : triples_) {
    if (t.head >= entity_count_ || t.tail >= entity_count_ ||
        t.relation >= relation_count_) {
      raise(ErrorCode::Validation, "triple id out of range");
    }
  }
  build_indexes();
}

void KnowledgeGraph::build_indexes() {
  by_head_rel_.clear();
  by_tail_rel_.clear();
  out_edges_.assign(entity_count_, {});
  in_edges_.assign(entity_count_, {});
  for (const Triple& t : triples_) {
    by_head_rel_[pair_key(t.head, t.relation)].push_back(t.tail);
    by_tail_rel_[pair_key(t.tail, t.relation)].push_back(t.head);
    out_edges_[t.head].push_back({t.relation, t.tail});
    in_edges_[t.tail].push_back({t.relation, t.head});
  }
  for (auto& [k, v] : by_head_rel_) std::sort(v.begin(), v.end());
  for (auto& [k, v] : by_tail_rel_) std::sort(v.begin(), v.end());
}

bool KnowledgeGraph::contains(EntityId head, RelationId relation,
                              EntityId tail) const {
  auto s = tails(head, relation);
  return std::binary_search(s.begin(), s.end(), tail);
}

std::span<const EntityId> KnowledgeGraph::tails(EntityId head,
                                                RelationId relation) const {
  auto it = by_head_rel_.find(pair_key(head, relation));
  if (it == by_head_rel_.end()) return {};
  return it->second;
}

std::span<const EntityId> KnowledgeGraph::heads(EntityId tail,
                                                RelationId relation) const {
  auto it = by_tail_rel_.find(pair_key(tail, relation));
  if (it == by_tail_rel_.end()) return {};
  return it->second;
}

std::span<const KnowledgeGraph::Neighbor> KnowledgeGraph::out_edges(
    EntityId e) const {
  return out_edges_.at(e);
}

std::span<const KnowledgeGraph::Neighbor> KnowledgeGraph::in_edges(
    EntityId e) const {
  return in_edges_.at(e);
}

bool KnowledgeGraph::indexes_consistent() const {
  std::size_t indexed = 0;
  for (const auto& [key, tails] : by_head_rel_) {
    auto head = static_cast<EntityId>(key >> 32);
    auto rel = static_cast<RelationId>(key & 0xffffffffu);
    for (EntityId tail : tails) {
      if (!std::binary_search(triples_.begin(), triples_.end(),
                              Triple{head, rel, tail})) {
        return false;
      }
      ++indexed;
    }
  }
  return indexed == triples_.size();
}

KnowledgeGraph load_triples(const std::string& path,
                            const LabelMaps* fixed_maps) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open triple file: " + path);

  LabelMap entities = fixed_maps ? fixed_maps->entities : LabelMap{};
  LabelMap relations = fixed_maps ? fixed_maps->relations : LabelMap{};
  std::vector<Triple> triples;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab1 + 1);
    auto tab3 = tab2 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab2 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        tab3 != std::string::npos) {
      raise(ErrorCode::Parse, path + ":" + std::to_string(line_no) +
                                  ": malformed line, expected 3 tab-separated "
                                  "columns");
    }
    std::string head = line.substr(0, tab1);
    std::string rel = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string tail = line.substr(tab2 + 1);

    Triple t{};
    if (fixed_maps) {
      auto h = entities.lookup(head);
      auto r = relations.lookup(rel);
      auto b = entities.lookup(tail);
      if (!h || !r || !b) {
        raise(ErrorCode::Validation,
              path + ":" + std::to_string(line_no) +
                  ": label unknown under the fixed id maps");
      }
      t = {*h, *r, *b};
    } else {
      t = {entities.intern(head), relations.intern(rel),
           entities.intern(tail)};
    }
    triples.push_back(t);
  }
  std::size_t entity_count = entities.size();
  std::size_t relation_count = relations.size();
  return KnowledgeGraph(entity_count, relation_count, std::move(triples),
                        std::move(entities), std::move(relations));
}

LabelMap load_label_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open label map: " + path);
  std::vector<std::string> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      raise(ErrorCode::Parse,
            path + ":" + std::to_string(line_no) + ": expected label<TAB>id");
    }
    std::string label = line.substr(0, tab);
    std::size_t id = std::stoull(line.substr(tab + 1));
    if (by_id.size() <= id) by_id.resize(id + 1);
    by_id[id] = label;
  }
  LabelMap map;
  for (std::size_t id = 0; id < by_id.size(); ++id) {
    if (by_id[id].empty()) {
      raise(ErrorCode::Validation,
            path + ": ids are not contiguous (missing id " +
                std::to_string(id) + ")");
    }
    map.intern(by_id[id]);
  }
  return map;
}

void save_label_map(const LabelMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot write label map: " + path);
  for (std::size_t id = 0; id < map.size(); ++id) {
    out << map.label(static_cast<std::uint32_t>(id)) << '\t' << id << '\n';
  }
}

KnowledgeGraph reverse_enrich(const KnowledgeGraph& kg) {
  auto base = static_cast<RelationId>(kg.relation_count());
  std::vector<Triple> triples = kg.triples();
  triples.reserve(triples.size() * 2);
  for (const Triple& t : kg.triples()) {
    triples.push_back({t.tail, static_cast<RelationId>(t.relation + base),
                       t.head});
  }
  LabelMap relations = kg.relation_labels();
  for (std::uint32_t r = 0; r < base && r < relations.size(); ++r) {
    relations.intern(relations.label(r) + "^-1");
  }
  return KnowledgeGraph(kg.entity_count(), kg.relation_count() * 2,
                        std::move(triples), kg.entity_labels(),
                        std::move(relations));
}

KgSplit load_split(const std::string& observed_path,
                   const std::string& complete_path) {
  KnowledgeGraph complete = load_triples(complete_path);
  LabelMaps maps{complete.entity_labels(), complete.relation_labels()};
  KnowledgeGraph observed = load_triples(observed_path, &maps);
  for (const Triple& t : observed.triples()) {
    if (!complete.contains(t.head, t.relation, t.tail)) {
      raise(ErrorCode::Validation,
            "observed graph is not contained in the complete graph");
    }
  }
  // Observed shares the complete vocabulary so ids line up across both.
  return KgSplit{KnowledgeGraph(complete.entity_count(),
                                complete.relation_count(), observed.triples(),
                                complete.entity_labels(),
                                complete.relation_labels()),
                 std::move(complete)};
}

}  // namespace efo
