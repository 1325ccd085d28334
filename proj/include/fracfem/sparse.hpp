#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracfem {

/// Square sparse matrix in compressed-row storage. Column indices are
/// sorted and unique within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Accumulating builder: duplicate (i,j) contributions are summed.
  class Builder {
   public:
    explicit Builder(int n) : n_(n), rows_(n) {}
    void add(int i, int j, double v) { rows_[i].emplace_back(j, v); }
    int size() const { return n_; }
    SparseMatrix build() const;

   private:
    int n_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
  };

  int size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  double diagonal(int i) const;

  /// Entry (i,j), 0 if not stored.
  double coeff(int i, int j) const;

  /// C = A + s * B; A and B need not share a sparsity pattern.
  static SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b,
                          double s = 1.0);
  /// A *= s.
  void scale(double s);

 private:
  int n_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
/// Non-convergence is reported, not thrown; a zero diagonal entry is a
/// hard error. max_iter <= 0 selects 4n + 200. x0 (optional) warm-starts.
std::pair<std::vector<double>, SolveReport> cg_solve(
    const SparseMatrix& a, std::span<const double> b, double tol = 1e-12,
    int max_iter = 0, std::span<const double> x0 = {});

/// Direct banded LU (no pivoting) for the narrow-band systems produced by
/// one-dimensional assemblies, where CG iteration counts blow up with the
/// O(h^-2) condition number. Also covers the non-symmetric band produced
/// by an implicit drift term.
class BandedLU {
 public:
  explicit BandedLU(const SparseMatrix& a);

  int bandwidth_lower() const { return kl_; }
  int bandwidth_upper() const { return ku_; }

  std::vector<double> solve(std::span<const double> b) const;

 private:
  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  std::vector<double> band_;  // (kl+ku+1) diagonals, factorized in place
};

}  // namespace fracfem
