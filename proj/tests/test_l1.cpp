#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracfem/l1.hpp"
#include "oracles.hpp"

using namespace fracfem;
using oracles::caputo_power_quad;

TEST_CASE("l1 weights basic structure") {
  const auto a = l1_weights(0.5, 6);
  REQUIRE(a.size() == 6);
  CHECK(a[0] == 1.0);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    CHECK(a[i] > a[i + 1]);  // strictly decreasing
    CHECK(a[i + 1] > 0.0);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double direct = std::pow(i + 1.0, 0.5) - std::pow(double(i), 0.5);
    CHECK(a[i] == doctest::Approx(direct).epsilon(1e-15));
  }
  CHECK_THROWS_AS(l1_weights(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(l1_weights(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(l1_weights(0.5, 0), std::invalid_argument);
}

TEST_CASE("b weights telescope the difference form") {
  for (double alpha : {0.25, 0.5, 0.9}) {
    const L1Kernel kernel(alpha, 0.1, 12);
    for (std::size_t n : {1ul, 2ul, 7ul, 12ul}) {
      const auto& b = b_weights(kernel, n).b;
      REQUIRE(b.size() == n + 1);
      double sum = 0;
      for (double v : b) sum += v;
      CHECK(std::abs(sum) < 1e-14);  // b-weights of a constant vanish
      // applying b to u^0..u^n must equal the a-weighted difference form
      std::mt19937_64 rng(7 * n);
      std::uniform_real_distribution<double> dist(-1, 1);
      std::vector<double> u(n + 1);
      for (double& v : u) v = dist(rng);
      double via_b = 0;
      for (std::size_t k = 0; k <= n; ++k) via_b += b[k] * u[n - k];
      double via_a = 0;
      const auto& a = kernel.a();
      for (std::size_t j = 1; j <= n; ++j) {
        via_a += a[n - j] * (u[j] - u[j - 1]);
      }
      CHECK(via_b == doctest::Approx(via_a).epsilon(1e-13));
    }
  }
}

TEST_CASE("caputo_l1_apply is exact on linear profiles") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double tau = 0.05;
    const std::size_t N = 20;
    const L1Kernel kernel(alpha, tau, N);
    std::vector<double> u(N + 1);
    for (std::size_t j = 0; j <= N; ++j) u[j] = 3.0 - 2.0 * (tau * j);
    for (std::size_t n : {1ul, 5ul, 20ul}) {
      const double t = tau * n;
      const double exact =
          -2.0 * std::pow(t, 1.0 - alpha) / std::tgamma(2.0 - alpha);
      const double got = caputo_l1_apply(u, kernel, n);
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("caputo_l1_apply truncation order is 2 - alpha on t^3") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double exact = caputo_power_quad(3.0, alpha, 1.0);
    std::vector<double> errs;
    for (int k = 4; k <= 8; ++k) {
      const std::size_t N = std::size_t(1) << k;
      const double tau = 1.0 / double(N);
      const L1Kernel kernel(alpha, tau, N);
      std::vector<double> u(N + 1);
      for (std::size_t j = 0; j <= N; ++j) u[j] = std::pow(tau * j, 3.0);
      errs.push_back(std::abs(caputo_l1_apply(u, kernel, N) - exact));
    }
    const double order = std::log2(errs[errs.size() - 2] / errs.back());
    CHECK(order == doctest::Approx(2.0 - alpha).epsilon(0.05));
  }
}

TEST_CASE("vector caputo_l1_apply matches scalar per component") {
  const L1Kernel kernel(0.4, 0.25, 4);
  std::vector<std::vector<double>> hist = {
      {1.0, 0.0}, {0.5, 2.0}, {0.25, -1.0}, {0.0, 0.5}, {1.0, 1.0}};
  const auto v = caputo_l1_apply(hist, kernel, 4);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> scalar;
    for (const auto& h : hist) scalar.push_back(h[c]);
    CHECK(v[c] == doctest::Approx(caputo_l1_apply(scalar, kernel, 4))
                      .epsilon(1e-15));
  }
  CHECK_THROWS_AS(caputo_l1_apply(hist, kernel, 5), std::invalid_argument);
}

TEST_CASE("p sequence satisfies the reconstruction identity") {
  for (double alpha : {0.15, 0.5, 0.85}) {
    const std::size_t N = 64;
    const auto ps = p_sequence(alpha, N);
    const auto a = l1_weights(alpha, N + 1);
    REQUIRE(ps.p.size() == N + 1);
    CHECK(ps.p[0] == 1.0);
    for (double v : ps.p) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t n : {1ul, 2ul, 17ul, 64ul}) {
      for (std::size_t k : {1ul, n / 2 + 1, n}) {
        double s = 0;
        for (std::size_t j = k; j <= n; ++j) s += ps.p[n - j] * a[j - k];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mittag_leffler special cases") {
  // alpha = 1 reduces to exp
  for (double z : {-3.0, -1.0, 0.0, 1.0, 4.0, 10.0}) {
    CHECK(mittag_leffler(1.0, z) ==
          doctest::Approx(std::exp(z)).epsilon(1e-13));
  }
  // alpha = 1/2 has the closed form e^{z^2} erfc(-z)
  for (double z = 0.0; z <= 5.0; z += 0.25) {
    const double oracle = std::exp(z * z) * std::erfc(-z);
    CHECK(mittag_leffler(0.5, z) == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(mittag_leffler(0.7, 0.0) == 1.0);
  // decay for moderate negative arguments where the alternating series is
  // still well conditioned
  const double em1 = mittag_leffler(0.5, -1.0);
  const double em2 = mittag_leffler(0.5, -2.0);
  CHECK(em2 > 0.0);
  CHECK(em2 < em1);
  CHECK(em1 < 1.0);
  CHECK(em1 == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-12));
  // huge positive arguments overflow to +inf rather than fail
  CHECK(std::isinf(mittag_leffler(0.25, 20.0)));
  // alternating series that overflow before settling must throw
  CHECK_THROWS_AS(mittag_leffler(0.5, -50.0), convergence_error);
  CHECK_THROWS_AS(mittag_leffler(0.02, -2.0), convergence_error);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("gronwall bound formula and check on an equality premise") {
  for (double alpha : {0.3, 0.6}) {
    for (double l1f : {0.0, 0.5}) {
      for (double l2f : {0.0, 2.0}) {
        const std::size_t N = 48;
        GronwallPremise premise;
        premise.alpha = alpha;
        premise.tau = 1.0 / double(N);
        premise.lambda1 = l1f;
        premise.lambda2 = l2f;
        premise.omega.assign(N + 1, 0.0);
        premise.omega[0] = 0.75;
        premise.g.assign(N, 0.25);
        const L1Kernel kernel(alpha, premise.tau, N);
        const auto& a = kernel.a();
        const double ct = kernel.scale();
        REQUIRE(ct > l1f);
        for (std::size_t n = 1; n <= N; ++n) {
          double hist = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const double b = j == 0 ? -a[n - 1] : a[n - j] - a[n - j - 1];
            hist += b * premise.omega[j];
          }
          premise.omega[n] =
              (-ct * hist + l2f * premise.omega[n - 1] + premise.g[n - 1]) /
              (ct - l1f);
        }
        const auto reports = gronwall_check(premise);
        REQUIRE(reports.size() == N);
        for (const auto& r : reports) {
          CHECK(r.premise_ok);
          CHECK(r.premise_ok_so_far);
          CHECK(r.bound_ok);
          // bound must reproduce its published closed form
          const double t = premise.tau * double(r.n);
          const double lam =
              l1f + l2f / (2.0 - std::pow(2.0, 1.0 - alpha));
          double gmax = 0.25;
          const double expect =
              2.0 *
              (premise.omega[0] +
               std::pow(t, alpha) / std::tgamma(1.0 + alpha) * gmax) *
              mittag_leffler(alpha, 2.0 * lam * std::pow(t, alpha));
          if (std::isfinite(expect)) {
            CHECK(r.bound == doctest::Approx(expect).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("gronwall premise violation is reported") {
  const std::size_t N = 8;
  GronwallPremise premise;
  premise.alpha = 0.5;
  premise.tau = 0.125;
  premise.lambda1 = 0.0;
  premise.lambda2 = 0.0;
  premise.omega.assign(N + 1, 0.0);
  premise.omega[0] = 1.0;
  premise.g.assign(N, 0.0);
  // omega jumping up with zero g and zero lambdas cannot satisfy the
  // recurrence: D^alpha omega > 0 = rhs at the jump
  premise.omega[3] = 5.0;
  const auto reports = gronwall_check(premise);
  CHECK_FALSE(reports[2].premise_ok);
  bool tail_flagged = true;
  for (std::size_t n = 3; n <= N; ++n) {
    tail_flagged = tail_flagged && !reports[n - 1].premise_ok_so_far;
  }
  CHECK(tail_flagged);
}

TEST_CASE("coercivity check accepts random sequences and catches scaling") {
  const std::size_t N = 32;
  const L1Kernel kernel(0.45, 1.0 / 32.0, N);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> hist(N + 1, std::vector<double>(4));
    for (auto& h : hist) {
      for (double& x : h) x = dist(rng);
    }
    const auto ok = coercivity_check(hist, kernel);
    REQUIRE(ok.size() == N);
    for (std::size_t n = 0; n < N; ++n) CHECK(ok[n]);
  }
}

TEST_CASE("gronwall premise validation rejects malformed data") {
  GronwallPremise premise;
  premise.alpha = 0.5;
  premise.tau = 0.1;
  premise.omega = {1.0, 0.9, 0.8};
  premise.g = {0.0, 0.0};
  CHECK_NOTHROW(premise.validate());
  premise.g.pop_back();
  CHECK_THROWS_AS(premise.validate(), std::invalid_argument);
  premise.g = {0.0, 0.0};
  premise.alpha = 1.5;
  CHECK_THROWS_AS(premise.validate(), std::invalid_argument);
  premise.alpha = 0.5;
  premise.tau = 0.0;
  CHECK_THROWS_AS(premise.validate(), std::invalid_argument);
  premise.tau = 0.1;
  premise.omega = {1.0, -0.5, 0.8};
  CHECK_THROWS_AS(premise.validate(), std::invalid_argument);
  premise.omega = {};
  premise.g = {};
  CHECK_THROWS_AS(premise.validate(), std::invalid_argument);
}
