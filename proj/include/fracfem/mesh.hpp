#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

namespace fracfem {

/// Uniform mesh of an interval (dim 1) or of a rectangle split into
/// triangles (dim 2). Nodes are numbered lexicographically, x fastest;
/// every rectangle cell is split along its bottom-left to top-right
/// diagonal and both triangles are oriented counter-clockwise.
struct Mesh {
  int dim = 1;
  int m = 0;                    // subdivisions per axis
  double h = 0;                 // max element diameter
  double lo[2] = {0, 0};        // domain bounds
  double hi[2] = {0, 0};
  std::vector<double> coords;   // dim doubles per node
  std::vector<int> elems;       // dim+1 node indices per element
  std::vector<int> boundary;    // sorted node ids on the domain boundary

  int nodes_per_element() const { return dim + 1; }
  int num_nodes() const { return static_cast<int>(coords.size()) / dim; }
  int num_elements() const {
    return static_cast<int>(elems.size()) / nodes_per_element();
  }
  const int* element(int e) const { return elems.data() + e * nodes_per_element(); }
  double coord(int node, int axis) const { return coords[node * dim + axis]; }

  /// Measure (length/area) of element e.
  double element_measure(int e) const;
};

Mesh interval_mesh(double a, double b, int m);
Mesh rect_tri_mesh(double x0, double x1, double y0, double y1, int m);

/// Plain-text dump: one node per line ("x" or "x y"), a blank line, then
/// one element per line of node indices. Debugging aid only.
void dump_mesh(const Mesh& mesh, std::ostream& os);

}  // namespace fracfem
