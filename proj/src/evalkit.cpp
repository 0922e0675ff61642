#include "efo/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "efo/error.hpp"

namespace efo {

double mrr_filtered(const FuzzyVector& answer,
                    const std::vector<EntityId>& easy,
                    const std::vector<EntityId>& hard) {
  if (hard.empty()) {
    raise(ErrorCode::Validation, "mrr_filtered: no target answers");
  }
  std::vector<char> filtered(answer.size(), 0);
  for (EntityId a : easy) filtered.at(a) = 1;
  for (EntityId a : hard) filtered.at(a) = 1;

  double total = 0.0;
  for (EntityId target : hard) {
    double score = answer[target];
    std::size_t rank = 1;
    for (std::size_t e = 0; e < answer.size(); ++e) {
      if (filtered[e]) continue;
      if (answer[e] > score) {
        ++rank;
      } else if (answer[e] == score && e < target) {
        ++rank;
      }
    }
    total += 1.0 / static_cast<double>(rank);
  }
  return total / static_cast<double>(hard.size());
}

namespace {

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EFO_FIT_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

EvalReport evaluate(const std::vector<QuerySample>& samples,
                    const MatrixSet& matrices, const InferenceConfig& cfg,
                    const EvalOptions& opts) {
  struct Outcome {
    double mrr = 0.0;
    bool ok = false;
    bool failed = false;
  };
  std::vector<Outcome> outcomes(samples.size());

  // InferenceStats is not thread-safe; workers run without instrumentation.
  InferenceConfig worker_cfg = cfg;
  worker_cfg.stats = nullptr;

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      const QuerySample& s = samples[i];
      try {
        const std::vector<EntityId>& targets = opts.faithful ? s.easy : s.hard;
        if (targets.empty()) {
          outcomes[i].failed = true;
          continue;
        }
        FuzzyVector answer_vec = answer(s.formula, matrices, worker_cfg);
        // Ranking always filters both splits; only the target set differs.
        outcomes[i].mrr = opts.faithful
                              ? mrr_filtered(answer_vec, s.hard, s.easy)
                              : mrr_filtered(answer_vec, s.easy, s.hard);
        outcomes[i].ok = true;
      } catch (const Error&) {
        outcomes[i].failed = true;
      }
    }
  };

  std::size_t workers = std::min(worker_count(opts.threads),
                                 std::max<std::size_t>(samples.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  EvalReport report;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (outcomes[i].failed) ++report.failures;
    if (!outcomes[i].ok) continue;
    auto& [sum, n] = sums[samples[i].structure];
    sum += outcomes[i].mrr;
    ++n;
  }

  double pos_sum = 0.0, neg_sum = 0.0;
  std::size_t pos_n = 0, neg_n = 0;
  for (const auto& [name, acc] : sums) {
    EvalReport::PerStructure per;
    per.count = acc.second;
    per.mrr_percent =
        acc.second == 0 ? 0.0 : 100.0 * acc.first / static_cast<double>(
                                                        acc.second);
    per.negative = is_negative_structure(name);
    report.structures[name] = per;
    if (per.negative) {
      neg_sum += per.mrr_percent;
      ++neg_n;
    } else {
      pos_sum += per.mrr_percent;
      ++pos_n;
    }
  }
  report.average_positive = pos_n ? pos_sum / pos_n : 0.0;
  report.average_negative = neg_n ? neg_sum / neg_n : 0.0;
  std::size_t all_n = pos_n + neg_n;
  report.average_all = all_n ? (pos_sum + neg_sum) / all_n : 0.0;
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  for (const auto& [name, per] : structures) {
    j["structures"][name] = {{"mrr", per.mrr_percent}, {"n", per.count}};
  }
  j["averages"] = {{"positive", average_positive},
                   {"negative", average_negative},
                   {"all", average_all}};
  j["failures"] = failures;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "structure      mrr(%)        n\n";
  char buf[64];
  for (const auto& [name, per] : structures) {
    std::snprintf(buf, sizeof(buf), "%-12s %8.2f %8zu\n", name.c_str(),
                  per.mrr_percent, per.count);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-12s %8.2f\n", "avg(pos)",
                average_positive);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-12s %8.2f\n", "avg(neg)",
                average_negative);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-12s %8.2f\n", "avg(all)", average_all);
  out << buf;
  if (failures) out << "failures: " << failures << "\n";
  return out.str();
}

}  // namespace efo
