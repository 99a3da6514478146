#pragma once

// Square sparse matrices in triplet form with a deterministic compression
// step, plus a sparse LU front end.
//
// compress() sorts triplets by (row, col, value) before summing duplicate
// runs, so the compressed matrix is bit-identical no matter in which order
// entries were added.  Solves go through Eigen's SparseLU; the reported
// residual is recomputed from the compressed matrix itself, never from the
// factors.

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace rshdg {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, int pivot)
      : std::runtime_error(what), pivot_index(pivot) {}
  int pivot_index;  // offending column, -1 if not identified
};

class SparseMatrix {
 public:
  explicit SparseMatrix(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SparseMatrix: dimension must be positive");
  }

  int size() const { return n_; }
  bool compressed() const { return compressed_; }

  void add(int row, int col, double value) {
    if (row < 0 || row >= n_ || col < 0 || col >= n_)
      throw std::out_of_range("SparseMatrix::add: index out of range");
    if (value == 0.0) return;
    compressed_ = false;
    triplets_.push_back({row, col, value});
  }

  void compress() {
    if (compressed_) return;
    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
      if (a.row != b.row) return a.row < b.row;
      if (a.col != b.col) return a.col < b.col;
      return a.value < b.value;
    });
    row_ptr_.assign(n_ + 1, 0);
    col_idx_.clear();
    values_.clear();
    std::size_t i = 0;
    while (i < triplets_.size()) {
      const int r = triplets_[i].row, c = triplets_[i].col;
      double sum = 0.0;
      while (i < triplets_.size() && triplets_[i].row == r && triplets_[i].col == c)
        sum += triplets_[i++].value;
      col_idx_.push_back(c);
      values_.push_back(sum);
      ++row_ptr_[r + 1];
    }
    for (int r = 0; r < n_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    compressed_ = true;
  }

  int nonzeros() const {
    require_compressed("nonzeros");
    return static_cast<int>(values_.size());
  }

  const std::vector<int>& row_ptr() const {
    require_compressed("row_ptr");
    return row_ptr_;
  }
  const std::vector<int>& col_idx() const {
    require_compressed("col_idx");
    return col_idx_;
  }
  const std::vector<double>& values() const {
    require_compressed("values");
    return values_;
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    require_compressed("multiply");
    if (x.size() != n_) throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        y[r] += values_[k] * x[col_idx_[k]];
    return y;
  }

  // Largest |A_ij - A_ji| over all entries.
  double symmetry_error() const {
    require_compressed("symmetry_error");
    double err = 0.0;
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        err = std::max(err, std::abs(values_[k] - coeff(col_idx_[k], r)));
    return err;
  }

  double coeff(int row, int col) const {
    require_compressed("coeff");
    for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
      if (col_idx_[k] == col) return values_[k];
    return 0.0;
  }

  Eigen::SparseMatrix<double> to_eigen() const {
    require_compressed("to_eigen");
    Eigen::SparseMatrix<double> a(n_, n_);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(values_.size());
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        t.emplace_back(r, col_idx_[k], values_[k]);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
  }

  Eigen::MatrixXd to_dense() const {
    require_compressed("to_dense");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        a(r, col_idx_[k]) = values_[k];
    return a;
  }

 private:
  struct Triplet {
    int row, col;
    double value;
  };

  void require_compressed(const char* who) const {
    if (!compressed_)
      throw std::logic_error(std::string("SparseMatrix::") + who +
                             ": compress() has not been called");
  }

  int n_;
  bool compressed_ = false;
  std::vector<Triplet> triplets_;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

enum class Ordering { fill_reducing, natural };

struct SolveReport {
  double relative_residual = 0.0;  // |Ax-b| / |b|, |b| = 0 treated as 1
  int pivot_count = 0;
  double elapsed_seconds = 0.0;
};

namespace detail {

// Locate a vanishing pivot column by dense elimination; used only to produce
// a useful error message for small singular systems.
inline int locate_singular_column(const SparseMatrix& m) {
  if (m.size() > 512) return -1;
  Eigen::MatrixXd a = m.to_dense();
  const int n = m.size();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    if (std::abs(a(piv, k)) < 1e-14) return k;
    a.row(k).swap(a.row(piv));
    for (int r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      a.row(r).tail(n - k) -= f * a.row(k).tail(n - k);
    }
  }
  return -1;
}

}  // namespace detail

class SparseFactorization {
 public:
  SparseFactorization(const SparseMatrix& m, Ordering ordering = Ordering::fill_reducing)
      : matrix_(m), ordering_(ordering) {
    matrix_.compress();
    // A structurally empty row or column is singular regardless of values.
    std::vector<bool> col_used(matrix_.size(), false);
    for (int c : matrix_.col_idx()) col_used[c] = true;
    for (int r = 0; r < matrix_.size(); ++r) {
      if (matrix_.row_ptr()[r] == matrix_.row_ptr()[r + 1])
        throw SingularMatrixError("SparseFactorization: row " + std::to_string(r) +
                                      " has no entries",
                                  r);
      if (!col_used[r])
        throw SingularMatrixError("SparseFactorization: column " + std::to_string(r) +
                                      " has no entries",
                                  r);
    }
    const Eigen::SparseMatrix<double> a = matrix_.to_eigen();
    bool ok = false;
    if (ordering_ == Ordering::fill_reducing) {
      colamd_.analyzePattern(a);
      colamd_.factorize(a);
      ok = (colamd_.info() == Eigen::Success);
    } else {
      natural_.analyzePattern(a);
      natural_.factorize(a);
      ok = (natural_.info() == Eigen::Success);
    }
    if (!ok)
      throw SingularMatrixError("SparseFactorization: matrix is singular",
                                detail::locate_singular_column(matrix_));
  }

  int size() const { return matrix_.size(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveReport* report = nullptr) const {
    if (rhs.size() != matrix_.size())
      throw std::invalid_argument("SparseFactorization::solve: size mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd x;
    if (ordering_ == Ordering::fill_reducing)
      x = colamd_.solve(rhs);
    else
      x = natural_.solve(rhs);
    if (report) {
      const auto t1 = std::chrono::steady_clock::now();
      const double bnorm = rhs.norm();
      report->relative_residual =
          (matrix_.multiply(x) - rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
      report->pivot_count = matrix_.size();
      report->elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
    }
    return x;
  }

 private:
  SparseMatrix matrix_;
  Ordering ordering_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> colamd_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> natural_;
};

inline SparseFactorization factorize(const SparseMatrix& m,
                                     Ordering ordering = Ordering::fill_reducing) {
  return SparseFactorization(m, ordering);
}

}  // namespace rshdg
