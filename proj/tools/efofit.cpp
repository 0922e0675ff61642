#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "efo/dnf.hpp"
#include "efo/error.hpp"
#include "efo/evalkit.hpp"
#include "efo/fit.hpp"
#include "efo/kg.hpp"
#include "efo/matrix_builder.hpp"
#include "efo/matrix_io.hpp"
#include "efo/oracle.hpp"
#include "efo/parse.hpp"
#include "efo/sampler.hpp"
#include "efo/selfcheck.hpp"
#include "efo/version.hpp"

namespace {

using namespace efo;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Usage:
    case ErrorCode::Config:
      return 2;
    case ErrorCode::NotEfo1:
    case ErrorCode::TrivialSubsentence:
    case ErrorCode::ConstantSelfLoop:
    case ErrorCode::DisconnectedClause:
    case ErrorCode::Validation:
      return 3;
    case ErrorCode::Limit:
      return 4;
    default:
      return 1;
  }
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct RunConfig {
  std::string kg_observed;
  std::string kg_complete;
  std::string matrices;
  std::string dense_matrices;
  std::string scores;
  std::string dataset;
  std::string out;
  std::string mode;
  std::string conj = "product";
  std::string disj = "godel";
  std::string exist = "godel";
  double eps = 0.005;
  double delta = 0.001;
  double cap = 0.9;
  double noise_per_row = 2.0;
  std::size_t budget_m = 10;
  std::uint64_t seed = 0;
  std::size_t count = 10;
  std::size_t top_k = 10;
  std::vector<std::string> structures;
  std::string query;
  bool classify_only = false;
  bool faithful = false;
  bool reverse = false;
  bool quick = false;

  nlohmann::json to_json() const {
    return {{"kg_observed", kg_observed},
            {"kg_complete", kg_complete},
            {"matrices", matrices},
            {"dense_matrices", dense_matrices},
            {"scores", scores},
            {"dataset", dataset},
            {"out", out},
            {"mode", mode},
            {"conj", conj},
            {"disj", disj},
            {"exist", exist},
            {"eps", eps},
            {"delta", delta},
            {"cap", cap},
            {"noise_per_row", noise_per_row},
            {"budget_m", budget_m},
            {"seed", seed},
            {"count", count},
            {"top_k", top_k},
            {"structures", structures},
            {"query", query},
            {"classify_only", classify_only},
            {"faithful", faithful},
            {"reverse", reverse},
            {"quick", quick},
            {"version", kVersion}};
  }
};

void print_resolved(const RunConfig& cfg) {
  std::cerr << "config: " << cfg.to_json().dump() << "\n";
}

InferenceConfig inference_config(const RunConfig& cfg) {
  InferenceConfig out;
  out.conjunction = tnorm_from_name(cfg.conj);
  out.disjunction = tnorm_from_name(cfg.disj);
  out.existential = tnorm_from_name(cfg.exist);
  out.budget_m = cfg.budget_m;
  out.validate();
  return out;
}

void write_provenance(const RunConfig& cfg, const std::string& out_path,
                      const std::vector<std::string>& inputs) {
  nlohmann::json prov;
  prov["tool_version"] = kVersion;
  prov["config"] = cfg.to_json();
  for (const std::string& path : inputs) {
    if (path.empty()) continue;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    prov["inputs"][path] = hex;
  }
  std::ofstream out(out_path + ".provenance.json");
  out << prov.dump(2) << '\n';
}

MatrixSet load_banks(const RunConfig& cfg) {
  if (cfg.matrices.empty()) {
    raise(ErrorCode::Usage, "--matrices is required");
  }
  MatrixSet set = load_matrix_set(cfg.matrices);
  if (!cfg.dense_matrices.empty()) {
    MatrixSet dense = load_matrix_set(cfg.dense_matrices);
    if (dense.entity_count != set.entity_count ||
        dense.relations.size() != set.relations.size()) {
      raise(ErrorCode::Validation,
            "dense bank shape does not match the sparse bank");
    }
    set.dense_relations = std::move(dense.relations);
  }
  return set;
}

int cmd_build(const RunConfig& cfg) {
  print_resolved(cfg);
  if (cfg.out.empty()) raise(ErrorCode::Usage, "--out is required");

  MatrixSet set;
  if (cfg.mode == "perfect") {
    std::string path = !cfg.kg_complete.empty() ? cfg.kg_complete
                                                : cfg.kg_observed;
    if (path.empty()) {
      raise(ErrorCode::Usage, "perfect mode needs --kg-complete or "
                              "--kg-observed");
    }
    KnowledgeGraph kg = load_triples(path);
    if (cfg.reverse) kg = reverse_enrich(kg);
    set = perfect_matrices(kg);
  } else if (cfg.mode == "consistent") {
    if (cfg.kg_observed.empty()) {
      raise(ErrorCode::Usage, "consistent mode needs --kg-observed");
    }
    KnowledgeGraph kg = load_triples(cfg.kg_observed);
    if (cfg.reverse) kg = reverse_enrich(kg);
    ConsistencyNoise noise{cfg.seed, cfg.cap, cfg.noise_per_row};
    set = consistent_matrices(kg, noise);
  } else if (cfg.mode == "train" || cfg.mode == "test" ||
             cfg.mode == "dense-test") {
    if (cfg.kg_observed.empty() || cfg.scores.empty()) {
      raise(ErrorCode::Usage,
            "calibrated modes need --kg-observed and --scores");
    }
    KnowledgeGraph kg = load_triples(cfg.kg_observed);
    if (cfg.reverse) kg = reverse_enrich(kg);
    ScoreFile scores(cfg.scores);
    CalibrationConfig ccfg;
    ccfg.epsilon = cfg.eps;
    ccfg.delta = cfg.delta;
    ccfg.mode = cfg.mode == "train"  ? CalibrationConfig::Mode::Train
                : cfg.mode == "test" ? CalibrationConfig::Mode::Test
                                     : CalibrationConfig::Mode::DenseTest;
    set = calibrate(scores, kg, ccfg);
  } else {
    raise(ErrorCode::Usage, "unknown --mode: " + cfg.mode);
  }

  save_matrix_set(set, cfg.out);
  write_provenance(cfg, cfg.out,
                   {cfg.kg_observed, cfg.kg_complete, cfg.scores});
  std::cout << "wrote " << cfg.out << " (" << set.relations.size()
            << " relations over " << set.entity_count << " entities)\n";
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  print_resolved(cfg);
  if (cfg.kg_observed.empty() || cfg.kg_complete.empty() || cfg.out.empty()) {
    raise(ErrorCode::Usage,
          "sample needs --kg-observed, --kg-complete and --out");
  }
  KgSplit split = load_split(cfg.kg_observed, cfg.kg_complete);

  EmitOptions opts;
  opts.structures = cfg.structures;
  opts.count_per_structure = cfg.count;
  opts.seed = cfg.seed;
  opts.observed_path = cfg.kg_observed;
  opts.complete_path = cfg.kg_complete;
  emit_dataset(opts, split.observed, split.complete, cfg.out);
  write_provenance(cfg, cfg.out, {cfg.kg_observed, cfg.kg_complete});
  std::cout << "wrote " << cfg.out << "\n";
  return 0;
}

int cmd_answer(const RunConfig& cfg) {
  print_resolved(cfg);
  if (cfg.query.empty()) raise(ErrorCode::Usage, "--query is required");

  FormulaPtr formula = parse_efo1(cfg.query);
  if (cfg.classify_only) {
    nlohmann::json j;
    j["query"] = cfg.query;
    j["classes"] = nlohmann::json::array();
    for (QueryClass c : classify(formula)) {
      j["classes"].push_back(query_class_name(c));
    }
    std::cout << j.dump() << "\n";
    return 0;
  }

  MatrixSet matrices = load_banks(cfg);
  FuzzyVector vec = answer(formula, matrices, inference_config(cfg));

  std::vector<std::pair<double, EntityId>> ranked;
  for (std::size_t a = 0; a < vec.size(); ++a) {
    ranked.emplace_back(vec[a], static_cast<EntityId>(a));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  if (ranked.size() > cfg.top_k) ranked.resize(cfg.top_k);

  nlohmann::json j;
  j["query"] = cfg.query;
  j["top_k"] = nlohmann::json::array();
  for (const auto& [score, entity] : ranked) {
    j["top_k"].push_back({entity, score});
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  print_resolved(cfg);
  if (cfg.dataset.empty()) raise(ErrorCode::Usage, "--dataset is required");

  std::vector<QuerySample> samples = load_dataset(cfg.dataset);
  MatrixSet matrices = load_banks(cfg);

  EvalOptions opts;
  opts.faithful = cfg.faithful;
  EvalReport report = evaluate(samples, matrices, inference_config(cfg), opts);

  std::cout << report.to_table();
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    out << report.to_json() << '\n';
    std::ofstream table(cfg.out + ".txt");
    table << report.to_table();
    write_provenance(cfg, cfg.out, {cfg.dataset, cfg.matrices,
                                    cfg.dense_matrices});
    std::cout << "wrote " << cfg.out << "\n";
  }
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  print_resolved(cfg);
  selfcheck::RandomKgSpec spec;
  if (cfg.quick) spec.max_entities = 15;
  std::size_t kgs = cfg.quick ? 4 : 10;

  std::vector<selfcheck::SuiteResult> results;
  results.push_back(selfcheck::perfectness_suite(kgs, cfg.seed, spec));
  results.push_back(selfcheck::faithfulness_suite(kgs, cfg.seed + 1, spec));
  results.push_back(
      selfcheck::qto_coincidence_suite(kgs, cfg.seed + 2, spec));
  results.push_back(selfcheck::negative_control(cfg.seed + 3));

  bool all_ok = true;
  for (const auto& r : results) {
    bool ok = r.passed();
    all_ok = all_ok && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << r.name << " ("
              << r.checks << " checks";
    if (r.failures) std::cout << ", " << r.failures << " failures";
    std::cout << ")\n";
    if (!ok && !r.first_failure.empty()) {
      std::cout << "     first failure: " << r.first_failure << "\n";
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy truth-value inference for EFO1 queries over knowledge "
               "graphs"};
  app.set_version_flag("--version", efo::kVersion);
  app.require_subcommand(1);

  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--kg-observed", cfg.kg_observed, "observed triples TSV");
    sub->add_option("--kg-complete", cfg.kg_complete, "complete triples TSV");
    sub->add_option("--matrices", cfg.matrices, "matrix bank file");
    sub->add_option("--dense-matrices", cfg.dense_matrices,
                    "optional dense bank for existential-free queries");
    sub->add_option("--conj", cfg.conj, "conjunction t-norm")
        ->check(CLI::IsMember({"product", "godel", "lukasiewicz"}));
    sub->add_option("--disj", cfg.disj, "disjunction t-conorm")
        ->check(CLI::IsMember({"product", "godel", "lukasiewicz"}));
    sub->add_option("--exist", cfg.exist,
                    "existential t-conorm (godel is the only sound choice)");
    sub->add_option("--eps", cfg.eps, "calibration sparsity threshold");
    sub->add_option("--delta", cfg.delta, "calibration margin below 1");
    sub->add_option("--budget-m", cfg.budget_m, "enumeration budget M");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output path");
  };

  CLI::App* build = app.add_subcommand("build", "build relation matrices");
  add_common(build);
  build->add_option("--mode", cfg.mode,
                    "perfect | consistent | train | test | dense-test")
      ->required();
  build->add_option("--scores", cfg.scores, "binary score file");
  build->add_option("--cap", cfg.cap, "consistent-mode noise cap");
  build->add_option("--noise-per-row", cfg.noise_per_row,
                    "consistent-mode expected noise entries per row");
  build->add_flag("--reverse", cfg.reverse,
                  "enrich the graph with reversed relations before building");

  CLI::App* sample = app.add_subcommand("sample", "sample grounded queries");
  add_common(sample);
  sample->add_option("--structures", cfg.structures,
                     "structure names (default: all)")
      ->delimiter(',');
  sample->add_option("--count", cfg.count, "samples per structure");

  CLI::App* ans = app.add_subcommand("answer", "answer one query");
  add_common(ans);
  ans->add_option("--query", cfg.query, "EFO1 query text")->required();
  ans->add_option("--top-k", cfg.top_k, "entities to report");
  ans->add_flag("--classify-only", cfg.classify_only,
                "print the structural classification and exit");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a dataset");
  add_common(eval);
  eval->add_option("--dataset", cfg.dataset, "dataset JSONL")->required();
  eval->add_flag("--faithful", cfg.faithful,
                 "rank deductible answers instead of predicted ones");

  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the oracle-backed verification suites");
  add_common(selftest);
  selftest->add_flag("--quick", cfg.quick, "smaller graphs, fewer seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_build(cfg);
    if (sample->parsed()) return cmd_sample(cfg);
    if (ans->parsed()) return cmd_answer(cfg);
    if (eval->parsed()) return cmd_eval(cfg);
    if (selftest->parsed()) return cmd_selftest(cfg);
  } catch (const efo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
