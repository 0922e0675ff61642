#include "efo/fuzzy.hpp"

#include <algorithm>

#include "efo/error.hpp"

namespace efo {

FuzzyVector FuzzyVector::one_hot(std::size_t n, EntityId a) {
  FuzzyVector v(n);
  v.v_.at(a) = 1.0;
  return v;
}

void FuzzyVector::validate() const {
  for (double x : v_) {
    if (!(x >= 0.0 && x <= 1.0)) {
      raise(ErrorCode::Validation,
            "fuzzy vector entry outside [0,1]: " + std::to_string(x));
    }
  }
}

FuzzyVector vec_combine(TNormKind kind, const FuzzyVector& u,
                        const FuzzyVector& v) {
  if (u.size() != v.size()) {
    raise(ErrorCode::Validation, "vec_combine: length mismatch");
  }
  FuzzyVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = tnorm(kind, u[i], v[i]);
  }
  return out;
}

FuzzyMatrix FuzzyMatrix::sparse(std::size_t n) {
  FuzzyMatrix m;
  m.layout_ = Layout::RowSparse;
  m.n_ = n;
  m.rows_.assign(n, {});
  return m;
}

FuzzyMatrix FuzzyMatrix::dense(std::size_t n) {
  FuzzyMatrix m;
  m.layout_ = Layout::DenseRows;
  m.n_ = n;
  m.dense_.assign(n * n, 0.0);
  return m;
}

std::size_t FuzzyMatrix::nnz() const {
  std::size_t count = 0;
  if (layout_ == Layout::RowSparse) {
    for (const auto& row : rows_) count += row.size();
  } else {
    for (double x : dense_) count += x != 0.0;
  }
  return count;
}

std::size_t FuzzyMatrix::row_nnz(EntityId row) const {
  if (layout_ == Layout::RowSparse) return rows_[row].size();
  std::size_t count = 0;
  const double* r = dense_.data() + static_cast<std::size_t>(row) * n_;
  for (std::size_t c = 0; c < n_; ++c) count += r[c] != 0.0;
  return count;
}

void FuzzyMatrix::set(EntityId row, EntityId col, double val) {
  if (row >= n_ || col >= n_) {
    raise(ErrorCode::Validation, "matrix index out of range");
  }
  if (!(val >= 0.0 && val <= 1.0)) {
    raise(ErrorCode::Validation,
          "matrix entry outside [0,1]: " + std::to_string(val));
  }
  if (layout_ == Layout::DenseRows) {
    dense_[static_cast<std::size_t>(row) * n_ + col] = val;
    return;
  }
  auto& r = rows_[row];
  auto it = std::lower_bound(
      r.begin(), r.end(), col,
      [](const Entry& e, EntityId c) { return e.col < c; });
  if (it != r.end() && it->col == col) {
    if (val == 0.0) {
      r.erase(it);
    } else {
      it->val = val;
    }
  } else if (val != 0.0) {
    r.insert(it, Entry{col, val});
  }
}

double FuzzyMatrix::at(EntityId row, EntityId col) const {
  if (layout_ == Layout::DenseRows) {
    return dense_[static_cast<std::size_t>(row) * n_ + col];
  }
  const auto& r = rows_[row];
  auto it = std::lower_bound(
      r.begin(), r.end(), col,
      [](const Entry& e, EntityId c) { return e.col < c; });
  if (it != r.end() && it->col == col) return it->val;
  return 0.0;
}

FuzzyMatrix FuzzyMatrix::transpose() const {
  FuzzyMatrix out =
      layout_ == Layout::DenseRows ? dense(n_) : sparse(n_);
  for (EntityId i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](EntityId j, double v) { out.set(j, i, v); });
  }
  return out;
}

FuzzyVector FuzzyMatrix::diag() const {
  FuzzyVector out(n_);
  for (EntityId i = 0; i < n_; ++i) out[i] = at(i, i);
  return out;
}

FuzzyVector FuzzyMatrix::col_max_reduce() const {
  FuzzyVector out(n_);
  for (EntityId i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](EntityId j, double v) {
      out[j] = std::max(out[j], v);
    });
  }
  return out;
}

FuzzyVector FuzzyMatrix::row_max_reduce() const {
  FuzzyVector out(n_);
  for (EntityId i = 0; i < n_; ++i) {
    double best = 0.0;
    for_each_in_row(i, [&](EntityId, double v) { best = std::max(best, v); });
    out[i] = best;
  }
  return out;
}

FuzzyMatrix FuzzyMatrix::to_dense() const {
  FuzzyMatrix out = dense(n_);
  for (EntityId i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](EntityId j, double v) { out.set(i, j, v); });
  }
  return out;
}

FuzzyMatrix FuzzyMatrix::to_sparse() const {
  FuzzyMatrix out = sparse(n_);
  for (EntityId i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](EntityId j, double v) { out.set(i, j, v); });
  }
  return out;
}

bool operator==(const FuzzyMatrix& a, const FuzzyMatrix& b) {
  if (a.n_ != b.n_) return false;
  for (EntityId i = 0; i < a.n_; ++i) {
    for (EntityId j = 0; j < a.n_; ++j) {
      if (a.at(i, j) != b.at(i, j)) return false;
    }
  }
  return true;
}

FuzzyMatrix mat_col_scale(TNormKind kind, const FuzzyMatrix& m,
                          const FuzzyVector& v) {
  if (v.size() != m.size()) {
    raise(ErrorCode::Validation, "mat_col_scale: dimension mismatch");
  }
  FuzzyMatrix out = m.layout() == FuzzyMatrix::Layout::DenseRows
                        ? FuzzyMatrix::dense(m.size())
                        : FuzzyMatrix::sparse(m.size());
  for (EntityId i = 0; i < m.size(); ++i) {
    m.for_each_in_row(i, [&](EntityId j, double val) {
      out.set(i, j, tnorm(kind, val, v[j]));
    });
  }
  return out;
}

}  // namespace efo
