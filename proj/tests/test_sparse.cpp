#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracfem/sparse.hpp"
#include "oracles.hpp"

using namespace fracfem;

namespace {

SparseMatrix random_sparse(int n, double density, unsigned seed,
                           bool spd = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1, 1);
  std::uniform_real_distribution<double> coin(0, 1);
  SparseMatrix::Builder builder(n);
  std::vector<double> dense(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (coin(rng) > density && i != j) continue;
      const double v = val(rng);
      dense[std::size_t(i) * n + j] += v;
    }
  }
  if (spd) {
    // A := D^T D + n I is symmetric positive definite
    std::vector<double> sym(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = i == j ? double(n) : 0.0;
        for (int k = 0; k < n; ++k) {
          s += dense[std::size_t(k) * n + i] * dense[std::size_t(k) * n + j];
        }
        sym[std::size_t(i) * n + j] = s;
      }
    }
    dense = sym;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (dense[std::size_t(i) * n + j] != 0.0) {
        builder.add(i, j, dense[std::size_t(i) * n + j]);
      }
    }
  }
  return builder.build();
}

SparseMatrix laplacian_1d(int n) {
  SparseMatrix::Builder builder(n);
  for (int i = 0; i < n; ++i) {
    builder.add(i, i, 2.0);
    if (i > 0) builder.add(i, i - 1, -1.0);
    if (i + 1 < n) builder.add(i, i + 1, -1.0);
  }
  return builder.build();
}

}  // namespace

TEST_CASE("builder merges duplicates and sorts columns") {
  SparseMatrix::Builder builder(3);
  builder.add(0, 2, 1.0);
  builder.add(0, 0, 4.0);
  builder.add(0, 2, 2.5);
  builder.add(2, 1, -1.0);
  const auto m = builder.build();
  CHECK(m.size() == 3);
  CHECK(m.nnz() == 3);
  CHECK(m.coeff(0, 2) == doctest::Approx(3.5));
  CHECK(m.coeff(0, 0) == doctest::Approx(4.0));
  CHECK(m.coeff(2, 1) == doctest::Approx(-1.0));
  CHECK(m.coeff(1, 1) == 0.0);
  // columns sorted within each row
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  for (int r = 0; r < m.size(); ++r) {
    for (int k = offsets[r] + 1; k < offsets[r + 1]; ++k) {
      CHECK(cols[k - 1] < cols[k]);
    }
  }
  CHECK(m.diagonal(0) == doctest::Approx(4.0));
  CHECK(m.diagonal(1) == 0.0);
}

TEST_CASE("multiply matches dense arithmetic") {
  const int n = 17;
  const auto m = random_sparse(n, 0.3, 41);
  const auto dense = oracles::to_dense(m);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  const auto y = m.multiply(x);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += dense[std::size_t(i) * n + j] * x[j];
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-13));
  }
}

TEST_CASE("add combines mismatched patterns") {
  const int n = 11;
  const auto a = random_sparse(n, 0.25, 7);
  const auto b = random_sparse(n, 0.25, 8);
  const double s = -0.37;
  const auto c = SparseMatrix::add(a, b, s);
  const auto da = oracles::to_dense(a);
  const auto db = oracles::to_dense(b);
  const auto dc = oracles::to_dense(c);
  for (std::size_t k = 0; k < dc.size(); ++k) {
    CHECK(dc[k] == doctest::Approx(da[k] + s * db[k]).epsilon(1e-13));
  }
}

TEST_CASE("scale multiplies every entry") {
  auto m = random_sparse(6, 0.5, 13);
  const auto before = oracles::to_dense(m);
  m.scale(2.5);
  const auto after = oracles::to_dense(m);
  for (std::size_t k = 0; k < before.size(); ++k) {
    CHECK(after[k] == doctest::Approx(2.5 * before[k]).epsilon(1e-15));
  }
}

TEST_CASE("cg solves SPD systems to the dense answer") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const int n = 24;
    const auto a = random_sparse(n, 0.2, seed, /*spd=*/true);
    std::mt19937_64 rng(seed + 100);
    std::uniform_real_distribution<double> dist(-1, 1);
    std::vector<double> b(n);
    for (double& v : b) v = dist(rng);
    const auto [x, report] = cg_solve(a, b, 1e-13);
    CHECK(report.converged);
    const auto oracle = oracles::dense_solve(oracles::to_dense(a), b);
    for (int i = 0; i < n; ++i) {
      CHECK(x[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("cg converges within n iterations in exact arithmetic range") {
  // classic CG property; the 1D Laplacian is small enough that rounding
  // does not break finite termination
  const int n = 40;
  const auto a = laplacian_1d(n);
  std::vector<double> b(n, 1.0);
  const auto [x, report] = cg_solve(a, b, 1e-10, n);
  CHECK(report.converged);
  CHECK(report.iterations <= n);
  // sanity: residual really is small
  const auto r = a.multiply(x);
  double rnorm = 0, bnorm = 0;
  for (int i = 0; i < n; ++i) {
    rnorm += (r[i] - b[i]) * (r[i] - b[i]);
    bnorm += b[i] * b[i];
  }
  CHECK(std::sqrt(rnorm / bnorm) < 1e-9);
}

TEST_CASE("cg reports non-convergence instead of lying") {
  const int n = 60;
  const auto a = laplacian_1d(n);
  std::vector<double> b(n, 1.0);
  const auto [x, report] = cg_solve(a, b, 1e-14, 2);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 2);
  CHECK(report.rel_residual > 1e-14);
}

TEST_CASE("cg warm start from the exact answer converges immediately") {
  const int n = 30;
  const auto a = laplacian_1d(n);
  std::vector<double> b(n, 0.5);
  const auto [x0, r0] = cg_solve(a, b, 1e-13);
  REQUIRE(r0.converged);
  const auto [x1, r1] = cg_solve(a, b, 1e-13, 0, x0);
  CHECK(r1.converged);
  CHECK(r1.iterations <= 1);
}

TEST_CASE("cg rejects zero diagonal") {
  SparseMatrix::Builder builder(2);
  builder.add(0, 1, 1.0);
  builder.add(1, 0, 1.0);
  const auto a = builder.build();
  std::vector<double> b = {1.0, 1.0};
  CHECK_THROWS_AS(cg_solve(a, b), std::invalid_argument);
}

TEST_CASE("banded lu reproduces dense solutions") {
  // non-symmetric banded system similar to what an implicit drift term
  // produces in 1D
  const int n = 50;
  SparseMatrix::Builder builder(n);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-0.45, 0.45);
  for (int i = 0; i < n; ++i) {
    builder.add(i, i, 2.0 + dist(rng));
    if (i > 0) builder.add(i, i - 1, dist(rng));
    if (i + 1 < n) builder.add(i, i + 1, dist(rng));
    if (i + 2 < n) builder.add(i, i + 2, 0.2 * dist(rng));
  }
  const auto a = builder.build();
  std::vector<double> b(n);
  for (double& v : b) v = dist(rng);
  const BandedLU lu(a);
  CHECK(lu.bandwidth_lower() == 1);
  CHECK(lu.bandwidth_upper() == 2);
  const auto x = lu.solve(b);
  const auto oracle = oracles::dense_solve(oracles::to_dense(a), b);
  for (int i = 0; i < n; ++i) {
    CHECK(x[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
  }
}

TEST_CASE("banded lu factors once and solves many right-hand sides") {
  const int n = 12;
  const auto a = laplacian_1d(n);
  const BandedLU lu(a);
  for (unsigned seed : {11u, 12u}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2, 2);
    std::vector<double> b(n);
    for (double& v : b) v = dist(rng);
    const auto x = lu.solve(b);
    const auto r = a.multiply(x);
    for (int i = 0; i < n; ++i) {
      CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("banded lu rejects a singular pivot") {
  SparseMatrix::Builder builder(2);
  builder.add(0, 0, 0.0);
  builder.add(0, 1, 1.0);
  builder.add(1, 1, 1.0);
  const auto a = builder.build();
  CHECK_THROWS(BandedLU(a));
}

TEST_CASE("banded lu and cg agree on an SPD band") {
  const int n = 35;
  const auto a = laplacian_1d(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = std::sin(0.7 * i);
  const BandedLU lu(a);
  const auto xd = lu.solve(b);
  const auto [xc, report] = cg_solve(a, b, 1e-13);
  REQUIRE(report.converged);
  for (int i = 0; i < n; ++i) {
    CHECK(xd[i] == doctest::Approx(xc[i]).epsilon(1e-8));
  }
}
