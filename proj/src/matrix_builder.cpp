#include "efo/matrix_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "efo/error.hpp"

namespace efo {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SyntheticScorer::scores(EntityId head, RelationId relation,
                             std::span<float> out) const {
  for (std::size_t b = 0; b < out.size(); ++b) {
    std::uint64_t h = mix64(seed_ ^ mix64((static_cast<std::uint64_t>(relation)
                                           << 40) ^
                                          (static_cast<std::uint64_t>(head)
                                           << 20) ^
                                          b));
    // Scores in [-4, 4); plenty of spread for the softmax.
    out[b] = static_cast<float>(
        (static_cast<double>(h >> 11) / 9007199254740992.0) * 8.0 - 4.0);
  }
}

MatrixSet perfect_matrices(const KnowledgeGraph& kg) {
  MatrixSet set;
  set.entity_count = kg.entity_count();
  set.relations.reserve(kg.relation_count());
  for (std::size_t r = 0; r < kg.relation_count(); ++r) {
    set.relations.push_back(FuzzyMatrix::sparse(kg.entity_count()));
  }
  for (const Triple& t : kg.triples()) {
    set.relations[t.relation].set(t.head, t.tail, 1.0);
  }
  return set;
}

MatrixSet consistent_matrices(const KnowledgeGraph& observed,
                              const ConsistencyNoise& noise) {
  if (!(noise.cap > 0.0 && noise.cap < 1.0)) {
    raise(ErrorCode::Config, "consistency noise cap must lie in (0,1)");
  }
  MatrixSet set = perfect_matrices(observed);
  const std::size_t n = observed.entity_count();
  for (std::size_t r = 0; r < observed.relation_count(); ++r) {
    for (EntityId a = 0; a < n; ++a) {
      std::mt19937_64 rng(mix64(noise.seed ^ mix64((r << 32) ^ a)));
      std::poisson_distribution<int> count_dist(noise.noise_per_row);
      int extra = count_dist(rng);
      for (int k = 0; k < extra; ++k) {
        auto b = static_cast<EntityId>(rng() % n);
        if (observed.contains(a, static_cast<RelationId>(r), b)) continue;
        // Uniform in (0, cap]; never exactly 0 so the entry is storable.
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double v = noise.cap * (1.0 - u);
        if (v <= 0.0) v = noise.cap;
        set.relations[r].set(a, b, v);
      }
    }
  }
  return set;
}

namespace {

void softmax_row(std::span<const float> scores, std::vector<double>& out) {
  double max_score = -std::numeric_limits<double>::infinity();
  for (float s : scores) {
    if (!std::isfinite(s)) {
      raise(ErrorCode::Validation, "non-finite score in calibration input");
    }
    max_score = std::max(max_score, static_cast<double>(s));
  }
  out.resize(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(static_cast<double>(scores[i]) - max_score);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

FuzzyMatrix calibrate_relation(const ScoreSource& scores,
                               const KnowledgeGraph& observed, RelationId rel,
                               const CalibrationConfig& cfg) {
  const std::size_t n = observed.entity_count();
  const bool dense_out = cfg.mode != CalibrationConfig::Mode::Test;
  FuzzyMatrix m = dense_out ? FuzzyMatrix::dense(n) : FuzzyMatrix::sparse(n);

  std::vector<float> raw(n);
  std::vector<double> prob;
  for (EntityId a = 0; a < n; ++a) {
    scores.scores(a, rel, raw);
    softmax_row(raw, prob);

    auto observed_tails = observed.tails(a, rel);
    double scale = 1.0;
    if (!observed_tails.empty()) {
      double mass = 0.0;
      for (EntityId b : observed_tails) mass += prob[b];
      scale = static_cast<double>(observed_tails.size()) / mass;
    }

    for (EntityId b = 0; b < n; ++b) {
      double p = prob[b] * scale;
      bool is_observed = std::binary_search(observed_tails.begin(),
                                            observed_tails.end(), b);
      double value = 0.0;
      switch (cfg.mode) {
        case CalibrationConfig::Mode::Train:
          value = std::min(1.0, p);
          break;
        case CalibrationConfig::Mode::Test:
          if (is_observed) {
            value = 1.0;
          } else if (p < cfg.epsilon) {
            value = 0.0;
          } else {
            value = std::min(p, 1.0 - cfg.delta);
          }
          break;
        case CalibrationConfig::Mode::DenseTest:
          value = is_observed ? 1.0 : std::min(p, 1.0 - cfg.delta);
          break;
      }
      if (value != 0.0) m.set(a, b, value);
    }
  }
  return m;
}

}  // namespace

MatrixSet calibrate(const ScoreSource& scores, const KnowledgeGraph& observed,
                    const CalibrationConfig& cfg) {
  if (cfg.mode != CalibrationConfig::Mode::Train && cfg.delta <= 0.0) {
    raise(ErrorCode::Config,
          "delta must be positive: unobserved entries have to stay strictly "
          "below 1");
  }
  if (cfg.epsilon < 0.0 || cfg.epsilon >= 1.0 || cfg.delta >= 1.0) {
    raise(ErrorCode::Config, "calibration thresholds out of range");
  }
  if (scores.entity_count() != observed.entity_count()) {
    raise(ErrorCode::Config, "score source entity count mismatch");
  }

  const std::size_t scored = scores.relation_count();
  const std::size_t wanted = observed.relation_count();
  bool transpose_reversed = false;
  if (wanted == scored * 2) {
    transpose_reversed = true;  // reversed half comes from transposes
  } else if (wanted != scored) {
    raise(ErrorCode::Config,
          "score source covers " + std::to_string(scored) +
              " relations but the graph has " + std::to_string(wanted));
  }

  MatrixSet set;
  set.entity_count = observed.entity_count();
  set.relations.resize(wanted);
  for (std::size_t r = 0; r < scored; ++r) {
    set.relations[r] =
        calibrate_relation(scores, observed, static_cast<RelationId>(r), cfg);
  }
  if (transpose_reversed) {
    for (std::size_t r = 0; r < scored; ++r) {
      set.relations[scored + r] = set.relations[r].transpose();
    }
  }
  return set;
}

}  // namespace efo
