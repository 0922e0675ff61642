#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "efo/matrix_io.hpp"

namespace {

struct RunResult {
  int status = -1;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(EFOFIT_BINARY) + " " + args +
                    " 2>/tmp/efo_cli_stderr.txt";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) {
    result.output.append(buf.data(), n);
  }
  int rc = pclose(pipe);
  result.status = WEXITSTATUS(rc);
  return result;
}

std::string write_kg(const std::string& name, const std::string& body) {
  std::string path = "/tmp/efo_cli_" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kToyComplete =
    "a0\tr0\ta1\n"
    "a0\tr0\ta2\n"
    "a1\tr1\ta3\n"
    "a2\tr1\ta3\n"
    "a2\tr1\ta1\n";

const char* kToyObserved =
    "a0\tr0\ta1\n"
    "a0\tr0\ta2\n"
    "a1\tr1\ta3\n"
    "a2\tr1\ta1\n";

}  // namespace

TEST_CASE("build perfect matrices then answer a query") {
  std::string kg = write_kg("complete.tsv", kToyComplete);
  std::string matrices = "/tmp/efo_cli_perfect.bin";

  RunResult build = run("build --mode perfect --kg-complete " + kg +
                        " --out " + matrices);
  CHECK(build.status == 0);

  // The written file reloads to the in-memory build.
  efo::MatrixSet set = efo::load_matrix_set(matrices);
  CHECK(set.entity_count == 4);
  CHECK(set.relations.size() == 2);

  // Provenance sidecar exists.
  std::ifstream prov(matrices + ".provenance.json");
  CHECK(prov.good());

  RunResult ans = run("answer --matrices " + matrices +
                      " --query \"r0(a0,f)\" --top-k 2");
  CHECK(ans.status == 0);
  auto j = nlohmann::json::parse(ans.output);
  REQUIRE(j.at("top_k").size() == 2);
  CHECK(j["top_k"][0][1].get<double>() == 1.0);
  CHECK(j["top_k"][1][1].get<double>() == 1.0);
  int first = j["top_k"][0][0].get<int>();
  int second = j["top_k"][1][0].get<int>();
  CHECK(first == 1);
  CHECK(second == 2);
}

TEST_CASE("classify-only and the NotEFO1 error path") {
  std::string kg = write_kg("complete.tsv", kToyComplete);
  std::string matrices = "/tmp/efo_cli_perfect.bin";
  run("build --mode perfect --kg-complete " + kg + " --out " + matrices);

  RunResult classify = run("answer --matrices " + matrices +
                           " --query \"r0(a0,f)&r1(x1,f)\" --classify-only");
  CHECK(classify.status == 0);
  CHECK(classify.output.find("ExistentialLeaf") != std::string::npos);

  // A trivial query exits with the validation code.
  RunResult trivial = run("answer --matrices " + matrices +
                          " --query \"r0(a0,a1)&r1(a2,f)\"");
  CHECK(trivial.status == 3);
}

TEST_CASE("usage errors exit with code 2") {
  RunResult missing = run("answer");
  CHECK(missing.status == 2);
  RunResult bad_mode = run("build --mode nonsense --out /tmp/x.bin");
  CHECK(bad_mode.status == 2);
  RunResult bad_exist = run(
      "answer --matrices /nonexistent.bin --query \"r0(a0,f)\" "
      "--exist product");
  CHECK(bad_exist.status == 2);
}

TEST_CASE("sample then eval: perfect matrices score an all-100 table") {
  std::string complete = write_kg("complete.tsv", kToyComplete);
  std::string observed = write_kg("observed.tsv", kToyObserved);
  std::string matrices = "/tmp/efo_cli_perfect.bin";
  std::string dataset = "/tmp/efo_cli_dataset.jsonl";
  std::string report = "/tmp/efo_cli_report.json";

  CHECK(run("build --mode perfect --kg-complete " + complete + " --out " +
            matrices)
            .status == 0);
  CHECK(run("sample --kg-observed " + observed + " --kg-complete " +
            complete + " --structures 1p,2p --count 2 --seed 3 --out " +
            dataset)
            .status == 0);

  RunResult eval = run("eval --dataset " + dataset + " --matrices " +
                       matrices + " --budget-m 4 --out " + report);
  CHECK(eval.status == 0);
  std::ifstream in(report);
  auto j = nlohmann::json::parse(in);
  CHECK(j["structures"]["1p"]["mrr"].get<double>() == 100.0);
  CHECK(j["structures"]["2p"]["mrr"].get<double>() == 100.0);

  // Determinism: resampling with the same seed reproduces the dataset.
  std::string dataset2 = "/tmp/efo_cli_dataset2.jsonl";
  CHECK(run("sample --kg-observed " + observed + " --kg-complete " +
            complete + " --structures 1p,2p --count 2 --seed 3 --out " +
            dataset2)
            .status == 0);
  std::ifstream a(dataset), b(dataset2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("selftest quick mode passes") {
  RunResult selftest = run("selftest --quick --seed 1");
  CHECK(selftest.status == 0);
  CHECK(selftest.output.find("PASS perfectness") != std::string::npos);
  CHECK(selftest.output.find("PASS faithfulness") != std::string::npos);
  CHECK(selftest.output.find("PASS qto-coincidence") != std::string::npos);
  CHECK(selftest.output.find("PASS negative-control") != std::string::npos);
}
