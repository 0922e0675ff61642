#include "efo/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "efo/dnf.hpp"
#include "efo/error.hpp"
#include "efo/oracle.hpp"
#include "efo/parse.hpp"
#include "efo/version.hpp"

namespace efo {

namespace {

struct TermSpec {
  enum class Kind { Const, Var, Free };
  Kind kind = Kind::Free;
  int index = 0;  // constant slot or variable slot

  static TermSpec c(int i) { return {Kind::Const, i}; }
  static TermSpec x(int i) { return {Kind::Var, i}; }
  static TermSpec f() { return {Kind::Free, 0}; }
};

struct LitSpec {
  int rel_slot;
  TermSpec head;
  TermSpec tail;
  bool positive = true;
  int branch = 0;  // 0: witness branch; 1: alternative union branch
};

enum class Shape { Conjunctive, TwoBranchUnion, UnionInsideExists };

struct StructureTemplate {
  std::string name;
  int rel_slots = 0;
  int const_slots = 0;
  int var_slots = 0;
  std::vector<LitSpec> literals;
  std::vector<int> ground_order;
  Shape shape = Shape::Conjunctive;
  bool negative = false;

  std::string lisp;
  std::vector<int> lisp_rel_slots;
  std::vector<int> lisp_const_slots;
};

const TermSpec F = TermSpec::f();
const TermSpec C0 = TermSpec::c(0), C1 = TermSpec::c(1), C2 = TermSpec::c(2);
const TermSpec X1 = TermSpec::x(0), X2 = TermSpec::x(1);

std::vector<StructureTemplate> build_catalog() {
  std::vector<StructureTemplate> t;

  auto add = [&](StructureTemplate tpl) { t.push_back(std::move(tpl)); };

  add({"1p", 1, 1, 0, {{0, C0, F}}, {0}, Shape::Conjunctive, false,
       "(p,(e))", {0}, {0}});
  add({"2p", 2, 1, 1, {{0, C0, X1}, {1, X1, F}}, {1, 0}, Shape::Conjunctive,
       false, "(p,(p,(e)))", {1, 0}, {0}});
  add({"3p", 3, 1, 2, {{0, C0, X1}, {1, X1, X2}, {2, X2, F}}, {2, 1, 0},
       Shape::Conjunctive, false, "(p,(p,(p,(e))))", {2, 1, 0}, {0}});
  add({"2i", 2, 2, 0, {{0, C0, F}, {1, C1, F}}, {0, 1}, Shape::Conjunctive,
       false, "(i,(p,(e)),(p,(e)))", {0, 1}, {0, 1}});
  add({"3i", 3, 3, 0, {{0, C0, F}, {1, C1, F}, {2, C2, F}}, {0, 1, 2},
       Shape::Conjunctive, false, "(i,(p,(e)),(p,(e)),(p,(e)))", {0, 1, 2},
       {0, 1, 2}});
  add({"pi", 3, 2, 1, {{0, C0, X1}, {1, X1, F}, {2, C1, F}}, {1, 0, 2},
       Shape::Conjunctive, false, "(i,(p,(p,(e))),(p,(e)))", {1, 0, 2},
       {0, 1}});
  add({"ip", 3, 2, 1, {{0, C0, X1}, {1, C1, X1}, {2, X1, F}}, {2, 0, 1},
       Shape::Conjunctive, false, "(p,(i,(p,(e)),(p,(e))))", {2, 0, 1},
       {0, 1}});
  add({"2in", 2, 2, 0, {{0, C0, F}, {1, C1, F, false}}, {0, 1},
       Shape::Conjunctive, true, "(i,(p,(e)),(n,(p,(e))))", {0, 1}, {0, 1}});
  add({"3in", 3, 3, 0, {{0, C0, F}, {1, C1, F}, {2, C2, F, false}},
       {0, 1, 2}, Shape::Conjunctive, true,
       "(i,(p,(e)),(p,(e)),(n,(p,(e))))", {0, 1, 2}, {0, 1, 2}});
  add({"inp", 3, 2, 1, {{0, C0, X1}, {1, C1, X1, false}, {2, X1, F}},
       {2, 0, 1}, Shape::Conjunctive, true, "(p,(i,(p,(e)),(n,(p,(e)))))",
       {2, 0, 1}, {0, 1}});
  add({"pin", 3, 2, 1, {{0, C0, X1}, {1, X1, F}, {2, C1, F, false}},
       {1, 0, 2}, Shape::Conjunctive, true, "(i,(p,(p,(e))),(n,(p,(e))))",
       {1, 0, 2}, {0, 1}});
  add({"pni", 3, 2, 1, {{0, C0, X1}, {1, X1, F, false}, {2, C1, F}},
       {2, 0, 1}, Shape::Conjunctive, true, "(i,(n,(p,(p,(e)))),(p,(e)))",
       {1, 0, 2}, {0, 1}});
  add({"2u", 2, 2, 0, {{0, C0, F, true, 0}, {1, C1, F, true, 1}}, {0, 1},
       Shape::TwoBranchUnion, false, "(u,(p,(e)),(p,(e)))", {0, 1}, {0, 1}});
  add({"up", 3, 2, 1,
       {{0, C0, X1, true, 0}, {1, C1, X1, true, 1}, {2, X1, F, true, 0}},
       {2, 0, 1}, Shape::UnionInsideExists, false, "(p,(u,(p,(e)),(p,(e))))",
       {2, 0, 1}, {0, 1}});

  add({"2il", 2, 1, 1, {{0, C0, F}, {1, X1, F}}, {0, 1}, Shape::Conjunctive,
       false, "(p,(e))", {0}, {0}});
  add({"3il", 3, 2, 1, {{0, C0, F}, {1, C1, F}, {2, X1, F}}, {0, 1, 2},
       Shape::Conjunctive, false, "(i,(p,(e)),(p,(e)))", {0, 1}, {0, 1}});
  add({"2m", 3, 1, 1, {{0, C0, X1}, {1, X1, F}, {2, X1, F}}, {1, 2, 0},
       Shape::Conjunctive, false, "(i,(p,(p,(e))),(p,(p,(e))))", {1, 0, 2, 0},
       {0, 0}});
  add({"2nm", 3, 1, 1, {{0, C0, X1}, {1, X1, F}, {2, X1, F, false}},
       {1, 0, 2}, Shape::Conjunctive, true,
       "(i,(n,(p,(p,(e)))),(p,(p,(e))))", {2, 0, 1, 0}, {0, 0}});
  add({"3mp", 4, 1, 2,
       {{0, C0, X1}, {1, X1, X2}, {2, X2, F}, {3, X1, X2}}, {2, 1, 3, 0},
       Shape::Conjunctive, false, "(p,(i,(p,(p,(e))),(p,(p,(e)))))",
       {2, 1, 0, 3, 0}, {0, 0}});
  add({"3pm", 4, 1, 2,
       {{0, C0, X1}, {1, X1, X2}, {2, X2, F}, {3, X2, F}}, {2, 3, 1, 0},
       Shape::Conjunctive, false, "(i,(p,(p,(p,(e)))),(p,(p,(p,(e)))))",
       {2, 1, 0, 3, 1, 0}, {0, 0}});
  add({"im", 4, 2, 1,
       {{0, C0, X1}, {1, C1, X1}, {2, X1, F}, {3, X1, F}}, {2, 3, 0, 1},
       Shape::Conjunctive, false,
       "(i,(p,(i,(p,(e)),(p,(e)))),(p,(i,(p,(e)),(p,(e)))))",
       {2, 0, 1, 3, 0, 1}, {0, 1, 0, 1}});
  add({"3c", 5, 2, 2,
       {{0, C0, X1}, {1, X1, F}, {2, C1, X2}, {3, X2, F}, {4, X1, X2}},
       {1, 4, 3, 0, 2}, Shape::Conjunctive, false,
       "(i,(p,(i,(p,(e)),(p,(p,(e))))),(p,(p,(e))))", {3, 2, 4, 0, 1, 0},
       {1, 0, 0}});
  add({"3cm", 6, 2, 2,
       {{0, C0, X1},
        {1, X1, F},
        {2, C1, X2},
        {3, X2, F},
        {4, X1, X2},
        {5, X1, F}},
       {1, 4, 3, 5, 0, 2}, Shape::Conjunctive, false,
       "(i,(i,(p,(p,(e))),(p,(p,(e)))),(p,(i,(p,(e)),(p,(p,(e))))))",
       {1, 0, 5, 0, 3, 2, 4, 0}, {0, 0, 1, 0}});

  return t;
}

const std::vector<StructureTemplate>& catalog() {
  static const std::vector<StructureTemplate> t = build_catalog();
  return t;
}

const StructureTemplate& find_template(const std::string& name) {
  for (const StructureTemplate& t : catalog()) {
    if (t.name == name) return t;
  }
  raise(ErrorCode::Usage, "unknown query structure: " + name);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// One grounding attempt: walks the template's literal order, assigning
// witness values to variables and concrete ids to relation/constant slots,
// always backed by an actual path in the graph so the witness answer holds.
struct Grounder {
  const StructureTemplate& tpl;
  const KnowledgeGraph& kg;
  std::mt19937_64& rng;

  std::vector<std::optional<RelationId>> rels;
  std::vector<std::optional<EntityId>> consts;
  std::vector<std::optional<EntityId>> vars;
  EntityId witness = 0;

  Grounder(const StructureTemplate& t, const KnowledgeGraph& g,
           std::mt19937_64& r)
      : tpl(t), kg(g), rng(r) {
    rels.assign(tpl.rel_slots, std::nullopt);
    consts.assign(tpl.const_slots, std::nullopt);
    vars.assign(tpl.var_slots, std::nullopt);
  }

  std::optional<EntityId> term_value(const TermSpec& t) const {
    switch (t.kind) {
      case TermSpec::Kind::Const:
        return consts[t.index];
      case TermSpec::Kind::Var:
        return vars[t.index];
      case TermSpec::Kind::Free:
        return witness;
    }
    return std::nullopt;
  }

  void assign_term(const TermSpec& t, EntityId v) {
    if (t.kind == TermSpec::Kind::Const) {
      consts[t.index] = v;
    } else if (t.kind == TermSpec::Kind::Var) {
      vars[t.index] = v;
    }
  }

  // Identical grounded atoms would collapse two template edges into one.
  bool clashes(const LitSpec& lit, RelationId rel) const {
    for (const LitSpec& other : tpl.literals) {
      if (&other == &lit) continue;
      if (!rels[other.rel_slot].has_value()) continue;
      if (*rels[other.rel_slot] != rel) continue;
      if (other.head.kind != lit.head.kind ||
          other.tail.kind != lit.tail.kind) {
        continue;
      }
      auto same_term = [&](const TermSpec& a, const TermSpec& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == TermSpec::Kind::Free) return true;
        if (a.kind == TermSpec::Kind::Var) return a.index == b.index;
        // Distinct constant slots with equal entities are the same term.
        return consts[a.index].has_value() && consts[b.index].has_value() &&
               *consts[a.index] == *consts[b.index];
      };
      if (same_term(other.head, lit.head) && same_term(other.tail, lit.tail) &&
          other.positive == lit.positive) {
        return true;
      }
    }
    return false;
  }

  bool ground_positive(const LitSpec& lit) {
    auto h = term_value(lit.head);
    auto t = term_value(lit.tail);
    if (h && t) {
      // Closing edge: pick among relations that connect the two values.
      std::vector<RelationId> options;
      for (const auto& n : kg.out_edges(*h)) {
        if (n.entity == *t && !clashes(lit, n.relation) &&
            std::find(options.begin(), options.end(), n.relation) ==
                options.end()) {
          options.push_back(n.relation);
        }
      }
      if (options.empty()) return false;
      rels[lit.rel_slot] = options[pick_index(rng, options.size())];
      return true;
    }
    if (t) {
      auto in = kg.in_edges(*t);
      if (in.empty()) return false;
      const auto& pick = in[pick_index(rng, in.size())];
      if (clashes(lit, pick.relation)) return false;
      rels[lit.rel_slot] = pick.relation;
      assign_term(lit.head, pick.entity);
      return true;
    }
    if (h) {
      auto out = kg.out_edges(*h);
      if (out.empty()) return false;
      const auto& pick = out[pick_index(rng, out.size())];
      if (clashes(lit, pick.relation)) return false;
      rels[lit.rel_slot] = pick.relation;
      assign_term(lit.tail, pick.entity);
      return true;
    }
    // Free-floating literal: any triple grounds it.
    const auto& triples = kg.triples();
    if (triples.empty()) return false;
    const Triple& pick = triples[pick_index(rng, triples.size())];
    if (clashes(lit, pick.relation)) return false;
    rels[lit.rel_slot] = pick.relation;
    assign_term(lit.head, pick.head);
    assign_term(lit.tail, pick.tail);
    return true;
  }

  bool ground_negative(const LitSpec& lit) {
    auto h = term_value(lit.head);
    auto t = term_value(lit.tail);
    // Up to a few tries to find a non-edge with a fresh endpoint if one is
    // missing.
    for (int tries = 0; tries < 24; ++tries) {
      EntityId hv = h ? *h : static_cast<EntityId>(
                                 pick_index(rng, kg.entity_count()));
      EntityId tv = t ? *t : static_cast<EntityId>(
                                 pick_index(rng, kg.entity_count()));
      std::vector<RelationId> options;
      for (RelationId r = 0; r < kg.relation_count(); ++r) {
        if (!kg.contains(hv, r, tv) && !clashes(lit, r)) options.push_back(r);
      }
      if (options.empty()) continue;
      rels[lit.rel_slot] = options[pick_index(rng, options.size())];
      if (!h) assign_term(lit.head, hv);
      if (!t) assign_term(lit.tail, tv);
      return true;
    }
    return false;
  }

  // Alternative union branches only need to be well-formed, not witnessed.
  bool ground_unconstrained(const LitSpec& lit) {
    const auto& triples = kg.triples();
    if (triples.empty()) return false;
    const Triple& pick = triples[pick_index(rng, triples.size())];
    if (clashes(lit, pick.relation)) return false;
    rels[lit.rel_slot] = pick.relation;
    if (!term_value(lit.head)) assign_term(lit.head, pick.head);
    // Union branches share variables with the witness branch; never
    // reassign an already-known endpoint.
    if (!term_value(lit.tail)) assign_term(lit.tail, pick.tail);
    return true;
  }

  bool run() {
    witness = static_cast<EntityId>(pick_index(rng, kg.entity_count()));
    for (int idx : tpl.ground_order) {
      const LitSpec& lit = tpl.literals[idx];
      bool ok;
      if (lit.branch != 0) {
        ok = ground_unconstrained(lit);
      } else if (lit.positive) {
        ok = ground_positive(lit);
      } else {
        ok = ground_negative(lit);
      }
      if (!ok) return false;
    }
    return true;
  }
};

Term make_term(const TermSpec& spec,
               const std::vector<std::optional<EntityId>>& consts) {
  switch (spec.kind) {
    case TermSpec::Kind::Const:
      return Term::constant(*consts[spec.index]);
    case TermSpec::Kind::Var:
      return Term::exist_var("x" + std::to_string(spec.index + 1));
    case TermSpec::Kind::Free:
      return Term::free_var("f");
  }
  raise(ErrorCode::Internal, "bad term spec");
}

FormulaPtr build_formula(const StructureTemplate& tpl,
                         const std::vector<std::optional<RelationId>>& rels,
                         const std::vector<std::optional<EntityId>>& consts) {
  auto atom_of = [&](const LitSpec& lit) {
    FormulaPtr a = Formula::atom(*rels[lit.rel_slot],
                                 make_term(lit.head, consts),
                                 make_term(lit.tail, consts));
    return lit.positive ? a : Formula::negate(a);
  };

  FormulaPtr body;
  switch (tpl.shape) {
    case Shape::Conjunctive: {
      for (const LitSpec& lit : tpl.literals) {
        FormulaPtr a = atom_of(lit);
        body = body ? Formula::conj(body, a) : a;
      }
      break;
    }
    case Shape::TwoBranchUnion:
      body = Formula::disj(atom_of(tpl.literals[0]), atom_of(tpl.literals[1]));
      break;
    case Shape::UnionInsideExists:
      body = Formula::conj(
          Formula::disj(atom_of(tpl.literals[0]), atom_of(tpl.literals[1])),
          atom_of(tpl.literals[2]));
      break;
  }
  for (int v = tpl.var_slots - 1; v >= 0; --v) {
    body = Formula::exists("x" + std::to_string(v + 1), body);
  }
  return body;
}

}  // namespace

const std::vector<std::string>& structure_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const StructureTemplate& t : catalog()) out.push_back(t.name);
    return out;
  }();
  return names;
}

bool is_structure_name(const std::string& name) {
  const auto& names = structure_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_negative_structure(const std::string& name) {
  return find_template(name).negative;
}

bool is_existential_free_structure(const std::string& name) {
  return find_template(name).var_slots == 0;
}

GroundedStructure ground_structure(const std::string& structure,
                                   const KnowledgeGraph& kg,
                                   std::uint64_t seed,
                                   std::size_t max_attempts) {
  const StructureTemplate& tpl = find_template(structure);
  if (kg.entity_count() == 0 || kg.triples().empty()) {
    raise(ErrorCode::Validation, "cannot ground a structure on an empty graph");
  }
  std::mt19937_64 rng(mix64(seed));
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Grounder g(tpl, kg, rng);
    if (!g.run()) continue;
    GroundedStructure out;
    out.structure = structure;
    out.formula = build_formula(tpl, g.rels, g.consts);
    for (const auto& r : g.rels) out.relations.push_back(*r);
    for (const auto& c : g.consts) out.constants.push_back(*c);
    return out;
  }
  raise(ErrorCode::Limit,
        "grounding failed after " + std::to_string(max_attempts) +
            " attempts for structure " + structure);
}

LispTwin lisp_twin(const GroundedStructure& grounded) {
  const StructureTemplate& tpl = find_template(grounded.structure);
  LispTwin twin;
  twin.text = tpl.lisp;
  for (int slot : tpl.lisp_rel_slots) {
    twin.relations.push_back(grounded.relations.at(slot));
  }
  for (int slot : tpl.lisp_const_slots) {
    twin.entities.push_back(grounded.constants.at(slot));
  }
  return twin;
}

QuerySample sample(const std::string& structure,
                   const KnowledgeGraph& observed,
                   const KnowledgeGraph& complete, std::uint64_t seed,
                   const SampleOptions& opts) {
  const StructureTemplate& tpl = find_template(structure);
  if (complete.entity_count() == 0 || complete.triples().empty()) {
    raise(ErrorCode::Validation, "cannot sample from an empty graph");
  }
  if (observed.entity_count() != complete.entity_count() ||
      observed.relation_count() != complete.relation_count()) {
    raise(ErrorCode::Validation,
          "observed and complete graphs must share one vocabulary");
  }

  std::mt19937_64 rng(mix64(seed));
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    Grounder g(tpl, complete, rng);
    if (!g.run()) continue;

    GroundedStructure grounded;
    grounded.structure = structure;
    grounded.formula = build_formula(tpl, g.rels, g.consts);
    for (const auto& r : g.rels) grounded.relations.push_back(*r);
    for (const auto& c : g.consts) grounded.constants.push_back(*c);

    if (detect_trivial_subsentence(grounded.formula)) continue;

    std::set<EntityId> easy_set =
        oracle::answer_set_symbolic(grounded.formula, observed);
    std::set<EntityId> all_set =
        oracle::answer_set_symbolic(grounded.formula, complete);

    std::vector<EntityId> hard;
    for (EntityId a : all_set) {
      if (!easy_set.count(a)) hard.push_back(a);
    }
    if (hard.empty()) continue;
    if (opts.require_easy && easy_set.empty()) continue;

    QuerySample out;
    out.structure = structure;
    out.formula = grounded.formula;
    out.formula_text = print(grounded.formula);
    out.easy.assign(easy_set.begin(), easy_set.end());
    out.hard = std::move(hard);
    LispTwin twin = lisp_twin(grounded);
    out.lisp = twin.text;
    out.lisp_relations = std::move(twin.relations);
    out.lisp_entities = std::move(twin.entities);
    return out;
  }
  raise(ErrorCode::Limit,
        "sampling failed after " + std::to_string(opts.max_attempts) +
            " attempts for structure " + structure +
            " (no instance with non-empty hard answers found)");
}

void emit_dataset(const EmitOptions& opts, const KnowledgeGraph& observed,
                  const KnowledgeGraph& complete, const std::string& path) {
  std::vector<std::string> structures =
      opts.structures.empty() ? structure_names() : opts.structures;
  for (const std::string& s : structures) find_template(s);

  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot write dataset: " + path);

  std::map<std::string, std::size_t> counts;
  for (std::size_t si = 0; si < structures.size(); ++si) {
    for (std::size_t k = 0; k < opts.count_per_structure; ++k) {
      std::uint64_t sample_seed =
          mix64(opts.seed ^ mix64((static_cast<std::uint64_t>(si) << 32) | k));
      QuerySample s = sample(structures[si], observed, complete, sample_seed,
                             opts.sample);

      // Re-validate from the serialized text before writing.
      FormulaPtr reparsed = parse_efo1(s.formula_text);
      std::set<EntityId> easy_check =
          oracle::answer_set_symbolic(reparsed, observed);
      std::set<EntityId> all_check =
          oracle::answer_set_symbolic(reparsed, complete);
      std::vector<EntityId> easy(easy_check.begin(), easy_check.end());
      std::vector<EntityId> hard;
      for (EntityId a : all_check) {
        if (!easy_check.count(a)) hard.push_back(a);
      }
      if (easy != s.easy || hard != s.hard) {
        raise(ErrorCode::Internal,
              "emitted sample failed oracle re-validation: " +
                  s.formula_text);
      }

      nlohmann::json line{{"structure", s.structure},
                          {"formula", s.formula_text},
                          {"easy_answers", s.easy},
                          {"hard_answers", s.hard},
                          {"lisp", s.lisp},
                          {"lisp_relations", s.lisp_relations},
                          {"lisp_entities", s.lisp_entities}};
      out << line.dump() << '\n';
      ++counts[s.structure];
    }
  }
  out.close();

  nlohmann::json meta{{"seed", opts.seed},
                      {"counts", counts},
                      {"kg_observed", opts.observed_path},
                      {"kg_complete", opts.complete_path},
                      {"tool_version", kVersion}};
  std::ofstream meta_out(path + ".meta.json");
  meta_out << meta.dump(2) << '\n';
}

std::vector<QuerySample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open dataset: " + path);
  std::vector<QuerySample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      raise(ErrorCode::Parse,
            path + ":" + std::to_string(line_no) + ": bad JSON");
    }
    QuerySample s;
    s.structure = j.at("structure").get<std::string>();
    s.formula_text = j.at("formula").get<std::string>();
    s.formula = parse_efo1(s.formula_text);
    s.easy = j.at("easy_answers").get<std::vector<EntityId>>();
    s.hard = j.at("hard_answers").get<std::vector<EntityId>>();
    if (j.contains("lisp")) {
      s.lisp = j.at("lisp").get<std::string>();
      s.lisp_relations =
          j.value("lisp_relations", std::vector<RelationId>{});
      s.lisp_entities = j.value("lisp_entities", std::vector<EntityId>{});
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace efo
