#include "fracfem/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace fracfem {

double Mesh::element_measure(int e) const {
  const int* v = element(e);
  if (dim == 1) return std::abs(coord(v[1], 0) - coord(v[0], 0));
  const double x0 = coord(v[0], 0), y0 = coord(v[0], 1);
  const double x1 = coord(v[1], 0), y1 = coord(v[1], 1);
  const double x2 = coord(v[2], 0), y2 = coord(v[2], 1);
  return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
}

Mesh interval_mesh(double a, double b, int m) {
  if (!(a < b)) throw std::invalid_argument("interval_mesh: need a < b");
  if (m < 1) throw std::invalid_argument("interval_mesh: need m >= 1");
  Mesh mesh;
  mesh.dim = 1;
  mesh.m = m;
  mesh.lo[0] = a;
  mesh.hi[0] = b;
  mesh.h = (b - a) / m;
  mesh.coords.resize(m + 1);
  for (int i = 0; i <= m; ++i) mesh.coords[i] = a + i * (b - a) / m;
  mesh.elems.resize(2 * m);
  for (int e = 0; e < m; ++e) {
    mesh.elems[2 * e] = e;
    mesh.elems[2 * e + 1] = e + 1;
  }
  mesh.boundary = {0, m};
  return mesh;
}

Mesh rect_tri_mesh(double x0, double x1, double y0, double y1, int m) {
  if (!(x0 < x1) || !(y0 < y1)) {
    throw std::invalid_argument("rect_tri_mesh: degenerate rectangle");
  }
  if (m < 1) throw std::invalid_argument("rect_tri_mesh: need m >= 1");
  Mesh mesh;
  mesh.dim = 2;
  mesh.m = m;
  mesh.lo[0] = x0;
  mesh.lo[1] = y0;
  mesh.hi[0] = x1;
  mesh.hi[1] = y1;
  const double hx = (x1 - x0) / m;
  const double hy = (y1 - y0) / m;
  mesh.h = std::hypot(hx, hy);  // diagonal = max element diameter
  const int stride = m + 1;
  mesh.coords.resize(2 * stride * stride);
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      const int node = j * stride + i;
      mesh.coords[2 * node] = x0 + i * (x1 - x0) / m;
      mesh.coords[2 * node + 1] = y0 + j * (y1 - y0) / m;
    }
  }
  mesh.elems.reserve(6 * m * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int bl = j * stride + i;
      const int br = bl + 1;
      const int tl = bl + stride;
      const int tr = tl + 1;
      // both triangles share the bottom-left -> top-right diagonal, CCW
      mesh.elems.insert(mesh.elems.end(), {bl, br, tr});
      mesh.elems.insert(mesh.elems.end(), {bl, tr, tl});
    }
  }
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      if (i == 0 || i == m || j == 0 || j == m) {
        mesh.boundary.push_back(j * stride + i);
      }
    }
  }
  return mesh;
}

void dump_mesh(const Mesh& mesh, std::ostream& os) {
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    os << mesh.coord(n, 0);
    if (mesh.dim == 2) os << ' ' << mesh.coord(n, 1);
    os << '\n';
  }
  os << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int* v = mesh.element(e);
    for (int k = 0; k < mesh.nodes_per_element(); ++k) {
      os << v[k] << (k + 1 == mesh.nodes_per_element() ? '\n' : ' ');
    }
  }
}

}  // namespace fracfem
