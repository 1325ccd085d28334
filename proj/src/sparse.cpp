#include "fracfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracfem {

SparseMatrix SparseMatrix::Builder::build() const {
  SparseMatrix out;
  out.n_ = n_;
  out.row_offsets_.assign(1, 0);
  out.row_offsets_.reserve(n_ + 1);
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  out.col_indices_.reserve(total);
  out.values_.reserve(total);
  std::vector<std::pair<int, double>> scratch;
  for (int i = 0; i < n_; ++i) {
    scratch.assign(rows_[i].begin(), rows_[i].end());
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < scratch.size(); ++k) {
      if (!out.col_indices_.empty() &&
          out.col_indices_.size() > static_cast<std::size_t>(out.row_offsets_.back()) &&
          out.col_indices_.back() == scratch[k].first) {
        out.values_.back() += scratch[k].second;
      } else {
        out.col_indices_.push_back(scratch[k].first);
        out.values_.push_back(scratch[k].second);
      }
    }
    out.row_offsets_.push_back(static_cast<int>(out.col_indices_.size()));
  }
  return out;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(n_) ||
      y.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      s += values_[k] * x[col_indices_[k]];
    }
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseMatrix::diagonal(int i) const { return coeff(i, i); }

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[it - col_indices_.begin()];
}

SparseMatrix SparseMatrix::add(const SparseMatrix& a, const SparseMatrix& b,
                               double s) {
  if (a.n_ != b.n_) throw std::invalid_argument("sparse add: size mismatch");
  SparseMatrix out;
  out.n_ = a.n_;
  out.row_offsets_.assign(1, 0);
  for (int i = 0; i < a.n_; ++i) {
    int ka = a.row_offsets_[i], kb = b.row_offsets_[i];
    const int ea = a.row_offsets_[i + 1], eb = b.row_offsets_[i + 1];
    while (ka < ea || kb < eb) {
      int col;
      double val = 0;
      const int ca = ka < ea ? a.col_indices_[ka] : a.n_;
      const int cb = kb < eb ? b.col_indices_[kb] : a.n_;
      col = std::min(ca, cb);
      if (ca == col) val += a.values_[ka++];
      if (cb == col) val += s * b.values_[kb++];
      out.col_indices_.push_back(col);
      out.values_.push_back(val);
    }
    out.row_offsets_.push_back(static_cast<int>(out.col_indices_.size()));
  }
  return out;
}

void SparseMatrix::scale(double s) {
  for (double& v : values_) v *= s;
}

std::pair<std::vector<double>, SolveReport> cg_solve(const SparseMatrix& a,
                                                     std::span<const double> b,
                                                     double tol, int max_iter,
                                                     std::span<const double> x0) {
  const int n = a.size();
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("cg_solve: rhs dimension mismatch");
  }
  if (max_iter <= 0) max_iter = 4 * n + 200;

  std::vector<double> inv_diag(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.diagonal(i);
    if (d == 0.0) throw std::invalid_argument("cg_solve: zero diagonal entry");
    inv_diag[i] = 1.0 / d;
  }

  double bnorm = 0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  SolveReport report;
  if (bnorm == 0.0) {
    report.converged = true;
    return {std::vector<double>(n, 0.0), report};
  }

  std::vector<double> x(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  if (!x0.empty()) {
    if (x0.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("cg_solve: bad warm start size");
    }
    x.assign(x0.begin(), x0.end());
    std::vector<double> ax = a.multiply(x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  }

  std::vector<double> z(n), p(n), ap(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];
  double rnorm = 0;
  for (double v : r) rnorm += v * v;
  rnorm = std::sqrt(rnorm);

  const double target = tol * bnorm;
  int it = 0;
  while (rnorm > target && it < max_iter) {
    a.multiply(p, ap);
    double pap = 0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;  // loss of definiteness; report as-is
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_next = 0;
    for (int i = 0; i < n; ++i) rz_next += r[i] * z[i];
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = 0;
    for (double v : r) rnorm += v * v;
    rnorm = std::sqrt(rnorm);
    ++it;
  }

  report.iterations = it;
  report.rel_residual = rnorm / bnorm;
  report.converged = rnorm <= target;
  return {std::move(x), report};
}

BandedLU::BandedLU(const SparseMatrix& a) : n_(a.size()) {
  const auto offs = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (int i = 0; i < n_; ++i) {
    for (int k = offs[i]; k < offs[i + 1]; ++k) {
      const int j = cols[k];
      kl_ = std::max(kl_, i - j);
      ku_ = std::max(ku_, j - i);
    }
  }
  const int width = kl_ + ku_ + 1;
  band_.assign(static_cast<std::size_t>(n_) * width, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = offs[i]; k < offs[i + 1]; ++k) {
      const int j = cols[k];
      band_[static_cast<std::size_t>(i) * width + (j - i + kl_)] = vals[k];
    }
  }
  // in-place LU without pivoting; multipliers stored in the lower band
  for (int k = 0; k < n_; ++k) {
    const double pivot = band_[static_cast<std::size_t>(k) * width + kl_];
    if (pivot == 0.0) throw std::runtime_error("banded LU: zero pivot");
    const int imax = std::min(k + kl_, n_ - 1);
    for (int i = k + 1; i <= imax; ++i) {
      double& lik = band_[static_cast<std::size_t>(i) * width + (k - i + kl_)];
      if (lik == 0.0) continue;
      lik /= pivot;
      // fill-in stays inside the band when no pivoting is done
      const int jmax = std::min(k + ku_, n_ - 1);
      for (int j = k + 1; j <= jmax; ++j) {
        band_[static_cast<std::size_t>(i) * width + (j - i + kl_)] -=
            lik * band_[static_cast<std::size_t>(k) * width + (j - k + kl_)];
      }
    }
  }
}

std::vector<double> BandedLU::solve(std::span<const double> b) const {
  if (b.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("banded solve: dimension mismatch");
  }
  const int width = kl_ + ku_ + 1;
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n_; ++i) {
    const int jmin = std::max(0, i - kl_);
    double s = x[i];
    for (int j = jmin; j < i; ++j) {
      s -= band_[static_cast<std::size_t>(i) * width + (j - i + kl_)] * x[j];
    }
    x[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    const int jmax = std::min(n_ - 1, i + ku_);
    double s = x[i];
    for (int j = i + 1; j <= jmax; ++j) {
      s -= band_[static_cast<std::size_t>(i) * width + (j - i + kl_)] * x[j];
    }
    x[i] = s / band_[static_cast<std::size_t>(i) * width + kl_];
  }
  return x;
}

}  // namespace fracfem
