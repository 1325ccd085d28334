#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fracfem/mesh.hpp"

using namespace fracfem;

TEST_CASE("interval mesh layout") {
  const auto mesh = interval_mesh(0.0, 2.0, 8);
  CHECK(mesh.dim == 1);
  CHECK(mesh.m == 8);
  CHECK(mesh.num_nodes() == 9);
  CHECK(mesh.num_elements() == 8);
  CHECK(mesh.h == doctest::Approx(0.25).epsilon(1e-15));
  for (int i = 0; i <= 8; ++i) {
    CHECK(mesh.coord(i, 0) == doctest::Approx(0.25 * i).epsilon(1e-15));
  }
  double len = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) len += mesh.element_measure(e);
  CHECK(len == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(mesh.boundary.size() == 2);
  CHECK(mesh.boundary[0] == 0);
  CHECK(mesh.boundary[1] == 8);
  CHECK_THROWS_AS(interval_mesh(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(interval_mesh(1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("rectangle triangulation layout") {
  const int m = 5;
  const auto mesh = rect_tri_mesh(0.0, 1.0, 0.0, 1.0, m);
  CHECK(mesh.dim == 2);
  CHECK(mesh.num_nodes() == (m + 1) * (m + 1));
  CHECK(mesh.num_elements() == 2 * m * m);
  CHECK(mesh.h == doctest::Approx(std::sqrt(2.0) / m).epsilon(1e-14));

  // nodes are lexicographic, x fastest
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      const int node = j * (m + 1) + i;
      CHECK(mesh.coord(node, 0) == doctest::Approx(double(i) / m).epsilon(1e-15));
      CHECK(mesh.coord(node, 1) == doctest::Approx(double(j) / m).epsilon(1e-15));
    }
  }

  // every triangle has positive (counter-clockwise) signed area and the
  // areas tile the unit square
  double area = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int* v = mesh.element(e);
    const double x0 = mesh.coord(v[0], 0), y0 = mesh.coord(v[0], 1);
    const double x1 = mesh.coord(v[1], 0), y1 = mesh.coord(v[1], 1);
    const double x2 = mesh.coord(v[2], 0), y2 = mesh.coord(v[2], 1);
    const double signed2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    CHECK(signed2 > 0.0);
    CHECK(mesh.element_measure(e) ==
          doctest::Approx(0.5 * signed2).epsilon(1e-14));
    area += mesh.element_measure(e);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-13));

  // boundary = all nodes on the four edges, sorted, unique
  std::set<int> expect;
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      if (i == 0 || i == m || j == 0 || j == m) expect.insert(j * (m + 1) + i);
    }
  }
  REQUIRE(mesh.boundary.size() == expect.size());
  CHECK(mesh.boundary.size() == std::size_t(4 * m));
  std::size_t idx = 0;
  bool sorted = true;
  for (int node : expect) {
    sorted = sorted && (mesh.boundary[idx++] == node);
  }
  CHECK(sorted);
}

TEST_CASE("rectangle mesh respects general bounds") {
  const auto mesh = rect_tri_mesh(-1.0, 3.0, 2.0, 4.0, 4);
  double area = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) area += mesh.element_measure(e);
  CHECK(area == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(mesh.coord(0, 0) == -1.0);
  CHECK(mesh.coord(0, 1) == 2.0);
  const int last = mesh.num_nodes() - 1;
  CHECK(mesh.coord(last, 0) == 3.0);
  CHECK(mesh.coord(last, 1) == 4.0);
}

TEST_CASE("mesh dump is well formed") {
  const auto mesh = interval_mesh(0.0, 1.0, 2);
  std::ostringstream os;
  dump_mesh(mesh, os);
  const std::string text = os.str();
  CHECK(text.find('\n') != std::string::npos);
  CHECK(!text.empty());
}
