#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "efo/kg.hpp"
#include "efo/tnorm.hpp"

namespace efo {

// Membership vector over all entities, every entry in [0,1].
class FuzzyVector {
 public:
  FuzzyVector() = default;
  explicit FuzzyVector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  explicit FuzzyVector(std::vector<double> v) : v_(std::move(v)) { validate(); }

  static FuzzyVector ones(std::size_t n) { return FuzzyVector(n, 1.0); }
  static FuzzyVector one_hot(std::size_t n, EntityId a);

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  void validate() const;

  friend bool operator==(const FuzzyVector&, const FuzzyVector&) = default;

 private:
  std::vector<double> v_;
};

// Elementwise t-norm of two vectors of equal length.
FuzzyVector vec_combine(TNormKind kind, const FuzzyVector& u,
                        const FuzzyVector& v);

// Square fuzzy membership matrix over entities. Row-sparse storage keeps
// only entries in (0,1]; absent means exactly 0. A dense-row layout holds
// every cell and is used for the calibrated no-threshold variant.
class FuzzyMatrix {
 public:
  struct Entry {
    EntityId col;
    double val;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  enum class Layout { RowSparse, DenseRows };

  FuzzyMatrix() = default;
  static FuzzyMatrix sparse(std::size_t n);
  static FuzzyMatrix dense(std::size_t n);

  Layout layout() const { return layout_; }
  std::size_t size() const { return n_; }
  std::size_t nnz() const;
  std::size_t row_nnz(EntityId row) const;

  // Build-time mutation; set(i,j,0) on a sparse matrix erases the entry.
  void set(EntityId row, EntityId col, double val);

  double at(EntityId row, EntityId col) const;

  // Stored entries of a row; for dense layout the callback sees every
  // nonzero cell. Callback: fn(col, val).
  template <typename Fn>
  void for_each_in_row(EntityId row, Fn&& fn) const {
    if (layout_ == Layout::RowSparse) {
      for (const Entry& e : rows_[row]) fn(e.col, e.val);
    } else {
      const double* r = dense_.data() + static_cast<std::size_t>(row) * n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (r[c] != 0.0) fn(static_cast<EntityId>(c), r[c]);
      }
    }
  }

  std::span<const Entry> sparse_row(EntityId row) const { return rows_[row]; }

  FuzzyMatrix transpose() const;
  FuzzyVector diag() const;
  FuzzyVector col_max_reduce() const;
  FuzzyVector row_max_reduce() const;

  // Converts between layouts without changing values.
  FuzzyMatrix to_dense() const;
  FuzzyMatrix to_sparse() const;

  friend bool operator==(const FuzzyMatrix& a, const FuzzyMatrix& b);

 private:
  Layout layout_ = Layout::RowSparse;
  std::size_t n_ = 0;
  std::vector<std::vector<Entry>> rows_;  // sorted by col
  std::vector<double> dense_;             // row-major n*n
};

// N(i,j) = M(i,j) T v(j); zero results are dropped from sparse storage.
FuzzyMatrix mat_col_scale(TNormKind kind, const FuzzyMatrix& m,
                          const FuzzyVector& v);

// One bank of per-relation matrices, plus an optional dense-row bank that
// the engine prefers for queries without existential variables.
struct MatrixSet {
  std::size_t entity_count = 0;
  std::vector<FuzzyMatrix> relations;
  std::vector<FuzzyMatrix> dense_relations;  // empty or same length

  std::size_t relation_count() const { return relations.size(); }
  bool has_dense() const { return !dense_relations.empty(); }
  const FuzzyMatrix& matrix(RelationId r, bool prefer_dense) const {
    if (prefer_dense && has_dense()) return dense_relations.at(r);
    return relations.at(r);
  }
};

}  // namespace efo
