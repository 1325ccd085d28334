#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracfem/problems.hpp"
#include "oracles.hpp"

using namespace fracfem;

namespace {

// Spatial derivatives of the exact solution by central differences.
double laplacian_fd(const Problem& p, double x, double y, double t) {
  const double h = 1e-4;
  double lap = (p.u_exact(x + h, y, t) - 2 * p.u_exact(x, y, t) +
                p.u_exact(x - h, y, t)) /
               (h * h);
  if (p.dim == 2) {
    lap += (p.u_exact(x, y + h, t) - 2 * p.u_exact(x, y, t) +
            p.u_exact(x, y - h, t)) /
           (h * h);
  }
  return lap;
}

double dx_fd(const Problem& p, double x, double y, double t) {
  const double h = 1e-6;
  return (p.u_exact(x + h, y, t) - p.u_exact(x - h, y, t)) / (2 * h);
}

// Caputo derivative of the exact solution via the quadrature oracle.
// Every registry profile is a finite sum of time powers with spatial
// coefficients recoverable from u_exact itself.
double caputo_fd(const Problem& p, double x, double y, double t) {
  if (p.name == "huxley2d") {
    // u = (1 + t^3) c(x,y); the constant drops out
    const double c = p.u_exact(x, y, 1.0) - p.u_exact(x, y, 0.0);
    return c * oracles::caputo_power_quad(3.0, p.alpha, t);
  }
  if (p.name == "fisher1d" || p.name == "fisher2d") {
    // u = t^2 c(x,y)
    return p.u_exact(x, y, 1.0) * oracles::caputo_power_quad(2.0, p.alpha, t);
  }
  if (p.name == "fokker-planck1d") {
    // u = (t^alpha + t^2) c(x)
    const double c = p.u_exact(x, y, 1.0) / 2.0;
    return c * (oracles::caputo_power_quad(p.alpha, p.alpha, t) +
                oracles::caputo_power_quad(2.0, p.alpha, t));
  }
  throw std::logic_error("caputo_fd: unknown problem " + p.name);
}

}  // namespace

TEST_CASE("caputo_power matches the quadrature oracle") {
  struct Case {
    double sigma, alpha, t;
  };
  for (const auto& c : std::initializer_list<Case>{{2.3, 0.5, 0.7},
                                                   {3.0, 0.25, 1.0},
                                                   {0.6, 0.75, 0.35},
                                                   {0.4, 0.4, 0.9},
                                                   {1.0, 0.5, 0.5}}) {
    const double oracle = oracles::caputo_power_quad(c.sigma, c.alpha, c.t);
    CHECK(caputo_power(c.sigma, c.alpha, c.t) ==
          doctest::Approx(oracle).epsilon(1e-7));
  }
  CHECK(caputo_power(0.0, 0.5, 0.8) == 0.0);
}

TEST_CASE("registry lists exactly the documented problems") {
  const auto names = problem_names();
  REQUIRE(names.size() == 4);
  for (const char* expect :
       {"huxley2d", "fisher1d", "fisher2d", "fokker-planck1d"}) {
    CHECK(std::count(names.begin(), names.end(), expect) == 1);
  }
  CHECK_THROWS_AS(make_problem("bogus", 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("fisher1d", 1.0), std::invalid_argument);
}

TEST_CASE("problem metadata is coherent") {
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name, 0.6);
    CHECK(p.name == name);
    CHECK(p.alpha == 0.6);
    CHECK(p.T == 1.0);
    CHECK((p.dim == 1 || p.dim == 2));
    CHECK(p.hi[0] > p.lo[0]);
    CHECK_FALSE(p.lipschitz_note.empty());
    CHECK(bool(p.u_exact));
    CHECK(bool(p.u0));
    CHECK(bool(p.f));
    CHECK(bool(p.f1));
    CHECK(bool(p.g));
    CHECK(p.has_drift() == (name == "fokker-planck1d"));
  }
  const auto fp = make_problem("fokker-planck1d", 0.4);
  CHECK(fp.lo[0] == 0.0);
  CHECK(fp.hi[0] == doctest::Approx(3.14159265358979323846));
}

TEST_CASE("exact solutions vanish on the boundary and match u0 at t = 0") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0, 1);
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name, 0.35);
    for (int k = 0; k < 25; ++k) {
      const double t = unit(rng);
      if (p.dim == 1) {
        CHECK(std::abs(p.u_exact(p.lo[0], 0, t)) < 1e-13);
        CHECK(std::abs(p.u_exact(p.hi[0], 0, t)) < 1e-13);
      } else {
        const double sx = p.lo[0] + (p.hi[0] - p.lo[0]) * unit(rng);
        const double sy = p.lo[1] + (p.hi[1] - p.lo[1]) * unit(rng);
        for (const auto& [bx, by] :
             std::initializer_list<std::pair<double, double>>{
                 {p.lo[0], sy}, {p.hi[0], sy}, {sx, p.lo[1]}, {sx, p.hi[1]}}) {
          CHECK(std::abs(p.u_exact(bx, by, t)) < 1e-13);
        }
      }
      const double x = p.lo[0] + (p.hi[0] - p.lo[0]) * unit(rng);
      const double y = p.dim == 2 ? p.lo[1] + (p.hi[1] - p.lo[1]) * unit(rng)
                                  : 0.0;
      CHECK(p.u0(x, y) == doctest::Approx(p.u_exact(x, y, 0.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("f1 is the u-derivative of f") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> dist(-2, 2);
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name, 0.5);
    for (int k = 0; k < 30; ++k) {
      const double u = dist(rng);
      const double x = std::abs(dist(rng));
      const double y = std::abs(dist(rng));
      const double h = 1e-6;
      const double fd = (p.f(u + h, x, y) - p.f(u - h, x, y)) / (2 * h);
      CHECK(p.f1(u, x, y) == doctest::Approx(fd).epsilon(5e-9));
    }
  }
}

TEST_CASE("manufactured source closes the equation pointwise") {
  // D^alpha u - (Lap u + b u_x) - f(u) - g must vanish; the Caputo part
  // comes from the quadrature oracle, the spatial parts from finite
  // differences, so no library derivation is reused.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  std::uniform_real_distribution<double> time(0.2, 1.0);
  for (const auto& name : problem_names()) {
    for (double alpha : {0.3, 0.7}) {
      const auto p = make_problem(name, alpha);
      for (int k = 0; k < 10; ++k) {
        const double x = p.lo[0] + (p.hi[0] - p.lo[0]) * unit(rng);
        const double y =
            p.dim == 2 ? p.lo[1] + (p.hi[1] - p.lo[1]) * unit(rng) : 0.0;
        const double t = time(rng);
        const double u = p.u_exact(x, y, t);
        double residual = caputo_fd(p, x, y, t) - laplacian_fd(p, x, y, t) -
                          p.f(u, x, y) - p.g(x, y, t);
        if (p.has_drift()) residual -= p.drift_x(x, y) * dx_fd(p, x, y, t);
        const double scale = 1.0 + std::abs(p.g(x, y, t));
        CHECK(std::abs(residual) / scale < 2e-5);
      }
    }
  }
}
