#pragma once

#include <memory>
#include <string>

#include "efo/fuzzy.hpp"
#include "efo/matrix_builder.hpp"

namespace efo {

// Matrix file: one JSON header line
//   {"entities":N,"relations":R,"dtype":"f64","layout":"row-sparse"}
// followed by R little-endian binary blocks. Each block starts with a type
// byte (0 row-sparse, 1 dense-rows); sparse blocks hold u32 row count, then
// per row u32 row, u32 nnz, nnz * (u32 col, f64 val); dense blocks hold
// N*N f64 row-major.
void save_matrix_set(const MatrixSet& set, const std::string& path);
MatrixSet load_matrix_set(const std::string& path);

// Score file: one JSON header line
//   {"entities":N,"relations":R,"dtype":"f32","order":"relation-major,
//    head-major rows"}
// followed by R*N*N raw little-endian f32.
void save_score_file(const ScoreSource& scores, const std::string& path);

class ScoreFile : public ScoreSource {
 public:
  explicit ScoreFile(const std::string& path);
  ~ScoreFile() override;

  std::size_t entity_count() const override { return entities_; }
  std::size_t relation_count() const override { return relations_; }
  void scores(EntityId head, RelationId relation,
              std::span<float> out) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t entities_ = 0;
  std::size_t relations_ = 0;
};

}  // namespace efo
