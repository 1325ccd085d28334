#include "fracfem/fem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracfem {
namespace {

constexpr double kBoundaryTol = 1e-12;

struct ElemGeom {
  double origin[2];  // coordinates of vertex 0
  double jac[4];     // column k = vertex_{k+1} - vertex_0 (1D: just length)
  double det;        // signed measure factor (length / 2*area)
  double invt[4];    // inverse-transpose of jac
};

ElemGeom element_geometry(const Mesh& mesh, int e) {
  ElemGeom g{};
  const int* v = mesh.element(e);
  g.origin[0] = mesh.coord(v[0], 0);
  if (mesh.dim == 1) {
    g.jac[0] = mesh.coord(v[1], 0) - g.origin[0];
    g.det = g.jac[0];
    g.invt[0] = 1.0 / g.jac[0];
    return g;
  }
  g.origin[1] = mesh.coord(v[0], 1);
  g.jac[0] = mesh.coord(v[1], 0) - g.origin[0];  // j00
  g.jac[1] = mesh.coord(v[2], 0) - g.origin[0];  // j01
  g.jac[2] = mesh.coord(v[1], 1) - g.origin[1];  // j10
  g.jac[3] = mesh.coord(v[2], 1) - g.origin[1];  // j11
  g.det = g.jac[0] * g.jac[3] - g.jac[1] * g.jac[2];
  const double inv = 1.0 / g.det;
  g.invt[0] = g.jac[3] * inv;
  g.invt[1] = -g.jac[2] * inv;
  g.invt[2] = -g.jac[1] * inv;
  g.invt[3] = g.jac[0] * inv;
  return g;
}

void physical_point(const ElemGeom& g, int dim, const double* ref, double* x) {
  if (dim == 1) {
    x[0] = g.origin[0] + g.jac[0] * ref[0];
    x[1] = 0.0;
    return;
  }
  x[0] = g.origin[0] + g.jac[0] * ref[0] + g.jac[1] * ref[1];
  x[1] = g.origin[1] + g.jac[2] * ref[0] + g.jac[3] * ref[1];
}

void physical_gradient(const ElemGeom& g, int dim, const double* ref_grad,
                       double* out) {
  if (dim == 1) {
    out[0] = g.invt[0] * ref_grad[0];
    return;
  }
  out[0] = g.invt[0] * ref_grad[0] + g.invt[1] * ref_grad[1];
  out[1] = g.invt[2] * ref_grad[0] + g.invt[3] * ref_grad[1];
}

// Shape tables for one quadrature rule: values[q*nd + i] and
// ref_grads[(q*nd + i)*dim + k].
struct ShapeTable {
  int nd = 0;
  int dim = 1;
  std::vector<double> values;
  std::vector<double> ref_grads;
};

ShapeTable tabulate(const FemSpace& space, const QuadratureRule& rule) {
  ShapeTable t;
  t.nd = space.dofs_per_element();
  t.dim = space.dim();
  t.values.resize(rule.size() * t.nd);
  t.ref_grads.resize(rule.size() * t.nd * t.dim);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double* ref = rule.points.data() + q * t.dim;
    space.shape_values(ref, t.values.data() + q * t.nd);
    space.shape_gradients(ref, t.ref_grads.data() + q * t.nd * t.dim);
  }
  return t;
}

}  // namespace

QuadratureRule interval_gauss(int npoints) {
  if (npoints < 1) throw std::invalid_argument("interval_gauss: need >= 1 point");
  QuadratureRule rule;
  rule.dim = 1;
  rule.degree = 2 * npoints - 1;
  rule.points.resize(npoints);
  rule.weights.resize(npoints);
  const int n = npoints;
  for (int i = 0; i < n; ++i) {
    // Newton iteration for the i-th root of the Legendre polynomial P_n
    double x = std::cos(std::numbers::pi * (4.0 * i + 3.0) / (4.0 * n + 2.0));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule triangle_rule(int degree) {
  QuadratureRule rule;
  rule.dim = 2;
  auto add = [&rule](double l1, double l2, double w) {
    rule.points.push_back(l1);
    rule.points.push_back(l2);
    rule.weights.push_back(0.5 * w);  // barycentric weights sum to 1
  };
  auto add3 = [&add](double a, double b, double w) {
    // permutations of barycentric (a, b, b); stored as (lambda1, lambda2)
    add(b, b, w);
    add(a, b, w);
    add(b, a, w);
  };
  if (degree <= 1) {
    rule.degree = 1;
    add(1.0 / 3.0, 1.0 / 3.0, 1.0);
  } else if (degree == 2) {
    rule.degree = 2;
    add3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
  } else if (degree <= 5) {
    rule.degree = 5;
    add(1.0 / 3.0, 1.0 / 3.0, 0.225);
    add3(0.059715871789770, 0.470142064105115, 0.132394152788506);
    add3(0.797426985353087, 0.101286507323456, 0.125939180544827);
  } else if (degree == 6) {
    rule.degree = 6;
    add3(0.873821971016996, 0.063089014491502, 0.050844906370207);
    add3(0.501426509658179, 0.249286745170910, 0.116786275726379);
    const double a = 0.636502499121399, b = 0.310352451033785,
                 c = 0.053145049844816, w = 0.082851075618374;
    add(b, c, w);
    add(a, c, w);
    add(a, b, w);
    add(c, b, w);
    add(c, a, w);
    add(b, a, w);
  } else {
    throw std::invalid_argument("triangle_rule: degree > 6 unsupported");
  }
  return rule;
}

FemSpace::FemSpace(Mesh mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree != 1 && degree != 2) {
    throw std::invalid_argument("FemSpace: degree must be 1 or 2");
  }
  const int m = mesh_.m;
  if (mesh_.dim == 1) {
    quad_ = interval_gauss(3);
    err_quad_ = interval_gauss(5);
    dofs_per_element_ = degree + 1;
    if (degree == 1) {
      num_dofs_ = m + 1;
      element_dofs_.resize(2 * m);
      for (int e = 0; e < m; ++e) {
        element_dofs_[2 * e] = e;
        element_dofs_[2 * e + 1] = e + 1;
      }
    } else {
      num_dofs_ = 2 * m + 1;
      element_dofs_.resize(3 * m);
      for (int e = 0; e < m; ++e) {
        element_dofs_[3 * e] = 2 * e;      // left vertex
        element_dofs_[3 * e + 1] = 2 * e + 2;  // right vertex
        element_dofs_[3 * e + 2] = 2 * e + 1;  // midpoint
      }
    }
    dof_coords_.resize(2 * num_dofs_, 0.0);
    const double step = (mesh_.hi[0] - mesh_.lo[0]) / (degree * m);
    for (int i = 0; i < num_dofs_; ++i) dof_coords_[2 * i] = mesh_.lo[0] + i * step;
  } else {
    quad_ = triangle_rule(5);
    err_quad_ = triangle_rule(6);
    dofs_per_element_ = degree == 1 ? 3 : 6;
    const int coarse = m + 1;
    if (degree == 1) {
      num_dofs_ = coarse * coarse;
      element_dofs_.assign(mesh_.elems.begin(), mesh_.elems.end());
      dof_coords_.resize(2 * num_dofs_);
      for (int n = 0; n < num_dofs_; ++n) {
        dof_coords_[2 * n] = mesh_.coord(n, 0);
        dof_coords_[2 * n + 1] = mesh_.coord(n, 1);
      }
    } else {
      // P2 DOFs live on the (2m+1)^2 lattice: vertices at even-even
      // positions, edge midpoints elsewhere (the cell diagonal covers
      // odd-odd points). Lexicographic, x fastest.
      const int fine = 2 * m + 1;
      num_dofs_ = fine * fine;
      element_dofs_.resize(6 * mesh_.num_elements());
      auto lattice_dof = [fine](int lx, int ly) { return ly * fine + lx; };
      for (int e = 0; e < mesh_.num_elements(); ++e) {
        const int* v = mesh_.element(e);
        int lx[3], ly[3];
        for (int k = 0; k < 3; ++k) {
          lx[k] = 2 * (v[k] % coarse);
          ly[k] = 2 * (v[k] / coarse);
        }
        int* dofs = element_dofs_.data() + 6 * e;
        for (int k = 0; k < 3; ++k) dofs[k] = lattice_dof(lx[k], ly[k]);
        const int edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (int k = 0; k < 3; ++k) {
          const int a = edges[k][0], b = edges[k][1];
          dofs[3 + k] = lattice_dof((lx[a] + lx[b]) / 2, (ly[a] + ly[b]) / 2);
        }
      }
      dof_coords_.resize(2 * num_dofs_);
      const double sx = (mesh_.hi[0] - mesh_.lo[0]) / (2 * m);
      const double sy = (mesh_.hi[1] - mesh_.lo[1]) / (2 * m);
      for (int j = 0; j < fine; ++j) {
        for (int i = 0; i < fine; ++i) {
          const int d = j * fine + i;
          dof_coords_[2 * d] = mesh_.lo[0] + i * sx;
          dof_coords_[2 * d + 1] = mesh_.lo[1] + j * sy;
        }
      }
    }
  }

  constrained_mask_.assign(num_dofs_, 0);
  for (int d = 0; d < num_dofs_; ++d) {
    bool on_boundary = false;
    for (int axis = 0; axis < mesh_.dim; ++axis) {
      const double extent = mesh_.hi[axis] - mesh_.lo[axis];
      const double c = dof_coords_[2 * d + axis];
      if (std::abs(c - mesh_.lo[axis]) < kBoundaryTol * extent ||
          std::abs(c - mesh_.hi[axis]) < kBoundaryTol * extent) {
        on_boundary = true;
      }
    }
    constrained_mask_[d] = on_boundary ? 1 : 0;
    (on_boundary ? constrained_ : free_).push_back(d);
  }
}

void FemSpace::shape_values(const double* ref, double* values) const {
  if (mesh_.dim == 1) {
    const double x = ref[0];
    if (degree_ == 1) {
      values[0] = 1.0 - x;
      values[1] = x;
    } else {
      values[0] = (1.0 - x) * (1.0 - 2.0 * x);
      values[1] = x * (2.0 * x - 1.0);
      values[2] = 4.0 * x * (1.0 - x);
    }
    return;
  }
  const double l1 = ref[0], l2 = ref[1], l0 = 1.0 - l1 - l2;
  if (degree_ == 1) {
    values[0] = l0;
    values[1] = l1;
    values[2] = l2;
  } else {
    values[0] = l0 * (2.0 * l0 - 1.0);
    values[1] = l1 * (2.0 * l1 - 1.0);
    values[2] = l2 * (2.0 * l2 - 1.0);
    values[3] = 4.0 * l0 * l1;
    values[4] = 4.0 * l1 * l2;
    values[5] = 4.0 * l2 * l0;
  }
}

void FemSpace::shape_gradients(const double* ref, double* grads) const {
  if (mesh_.dim == 1) {
    const double x = ref[0];
    if (degree_ == 1) {
      grads[0] = -1.0;
      grads[1] = 1.0;
    } else {
      grads[0] = 4.0 * x - 3.0;
      grads[1] = 4.0 * x - 1.0;
      grads[2] = 4.0 - 8.0 * x;
    }
    return;
  }
  const double l1 = ref[0], l2 = ref[1], l0 = 1.0 - l1 - l2;
  // reference gradients of the barycentric coordinates
  const double g0[2] = {-1.0, -1.0}, g1[2] = {1.0, 0.0}, g2[2] = {0.0, 1.0};
  if (degree_ == 1) {
    grads[0] = g0[0]; grads[1] = g0[1];
    grads[2] = g1[0]; grads[3] = g1[1];
    grads[4] = g2[0]; grads[5] = g2[1];
    return;
  }
  auto vertex = [](double l, const double* g, double* out) {
    out[0] = (4.0 * l - 1.0) * g[0];
    out[1] = (4.0 * l - 1.0) * g[1];
  };
  auto edge = [](double la, const double* ga, double lb, const double* gb,
                 double* out) {
    out[0] = 4.0 * (la * gb[0] + lb * ga[0]);
    out[1] = 4.0 * (la * gb[1] + lb * ga[1]);
  };
  vertex(l0, g0, grads + 0);
  vertex(l1, g1, grads + 2);
  vertex(l2, g2, grads + 4);
  edge(l0, g0, l1, g1, grads + 6);
  edge(l1, g1, l2, g2, grads + 8);
  edge(l2, g2, l0, g0, grads + 10);
}

std::vector<double> interpolate_nodal(const FemSpace& space,
                                      const ScalarField& u) {
  std::vector<double> out(space.num_dofs());
  for (int d = 0; d < space.num_dofs(); ++d) {
    out[d] = u(space.dof_coord(d, 0), space.dof_coord(d, 1));
  }
  return out;
}

SparseMatrix assemble_stiffness(const FemSpace& space) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  SparseMatrix::Builder builder(space.num_dofs());
  std::vector<double> grads(nd * 2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(g.det);
      for (int i = 0; i < nd; ++i) {
        physical_gradient(g, dim, table.ref_grads.data() + (q * nd + i) * dim,
                          grads.data() + 2 * i);
      }
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          double dot = grads[2 * i] * grads[2 * j];
          if (dim == 2) dot += grads[2 * i + 1] * grads[2 * j + 1];
          builder.add(dofs[i], dofs[j], w * dot);
        }
      }
    }
  }
  return builder.build();
}

SparseMatrix assemble_mass(const FemSpace& space) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd;
  SparseMatrix::Builder builder(space.num_dofs());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(g.det);
      const double* shp = table.values.data() + q * nd;
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          builder.add(dofs[i], dofs[j], w * shp[i] * shp[j]);
        }
      }
    }
  }
  return builder.build();
}

SparseMatrix assemble_weighted_mass(const FemSpace& space,
                                    std::span<const double> u,
                                    const PointwiseFn& w) {
  if (u.size() != static_cast<std::size_t>(space.num_dofs())) {
    throw std::invalid_argument("assemble_weighted_mass: bad coefficient size");
  }
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  SparseMatrix::Builder builder(space.num_dofs());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double* shp = table.values.data() + q * nd;
      double uq = 0;
      for (int i = 0; i < nd; ++i) uq += u[dofs[i]] * shp[i];
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double factor =
          rule.weights[q] * std::abs(g.det) * w(uq, x[0], x[1]);
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          builder.add(dofs[i], dofs[j], factor * shp[i] * shp[j]);
        }
      }
    }
  }
  return builder.build();
}

SparseMatrix assemble_advection(const FemSpace& space, const ScalarField& b) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  SparseMatrix::Builder builder(space.num_dofs());
  std::vector<double> grads(nd * 2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      for (int i = 0; i < nd; ++i) {
        physical_gradient(g, dim, table.ref_grads.data() + (q * nd + i) * dim,
                          grads.data() + 2 * i);
      }
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double factor = rule.weights[q] * std::abs(g.det) * b(x[0], x[1]);
      const double* shp = table.values.data() + q * nd;
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          builder.add(dofs[i], dofs[j], factor * grads[2 * j] * shp[i]);
        }
      }
    }
  }
  return builder.build();
}

std::vector<double> assemble_load(const FemSpace& space, const ScalarField& w) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  std::vector<double> load(space.num_dofs(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double factor = rule.weights[q] * std::abs(g.det) * w(x[0], x[1]);
      const double* shp = table.values.data() + q * nd;
      for (int i = 0; i < nd; ++i) load[dofs[i]] += factor * shp[i];
    }
  }
  return load;
}

std::vector<double> nonlinear_load(const FemSpace& space,
                                   std::span<const double> u,
                                   const PointwiseFn& f) {
  if (u.size() != static_cast<std::size_t>(space.num_dofs())) {
    throw std::invalid_argument("nonlinear_load: bad coefficient size");
  }
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  std::vector<double> load(space.num_dofs(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double* shp = table.values.data() + q * nd;
      double uq = 0;
      for (int i = 0; i < nd; ++i) uq += u[dofs[i]] * shp[i];
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double factor =
          rule.weights[q] * std::abs(g.det) * f(uq, x[0], x[1]);
      for (int i = 0; i < nd; ++i) load[dofs[i]] += factor * shp[i];
    }
  }
  return load;
}

std::vector<double> advection_load(const FemSpace& space,
                                   std::span<const double> u,
                                   const ScalarField& b) {
  if (u.size() != static_cast<std::size_t>(space.num_dofs())) {
    throw std::invalid_argument("advection_load: bad coefficient size");
  }
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  std::vector<double> load(space.num_dofs(), 0.0);
  std::vector<double> grads(nd * 2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double dudx = 0;
      for (int i = 0; i < nd; ++i) {
        physical_gradient(g, dim, table.ref_grads.data() + (q * nd + i) * dim,
                          grads.data() + 2 * i);
        dudx += u[dofs[i]] * grads[2 * i];
      }
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double factor =
          rule.weights[q] * std::abs(g.det) * b(x[0], x[1]) * dudx;
      const double* shp = table.values.data() + q * nd;
      for (int i = 0; i < nd; ++i) load[dofs[i]] += factor * shp[i];
    }
  }
  return load;
}

void apply_dirichlet_matrix(SparseMatrix& a, std::span<const int> constrained) {
  std::vector<char> mask(a.size(), 0);
  for (int c : constrained) mask[c] = 1;
  const auto offs = a.row_offsets();
  const auto cols = a.col_indices();
  auto vals = a.values();
  for (int i = 0; i < a.size(); ++i) {
    for (int k = offs[i]; k < offs[i + 1]; ++k) {
      if (mask[i] || mask[cols[k]]) {
        vals[k] = (i == cols[k] && mask[i]) ? 1.0 : 0.0;
      }
    }
  }
}

void apply_dirichlet_rhs(std::span<double> rhs,
                         std::span<const int> constrained) {
  for (int c : constrained) rhs[c] = 0.0;
}

void apply_dirichlet(SparseMatrix& a, std::span<double> rhs,
                     std::span<const int> constrained) {
  apply_dirichlet_matrix(a, constrained);
  apply_dirichlet_rhs(rhs, constrained);
}

double l2_error(const FemSpace& space, std::span<const double> u,
                const ScalarField& exact) {
  if (u.size() != static_cast<std::size_t>(space.num_dofs())) {
    throw std::invalid_argument("l2_error: bad coefficient size");
  }
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.error_quadrature();
  const ShapeTable table = tabulate(space, rule);
  const int nd = table.nd, dim = table.dim;
  double total = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = space.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double* shp = table.values.data() + q * nd;
      double uq = 0;
      for (int i = 0; i < nd; ++i) uq += u[dofs[i]] * shp[i];
      double x[2];
      physical_point(g, dim, rule.points.data() + q * dim, x);
      const double diff = uq - exact(x[0], x[1]);
      total += rule.weights[q] * std::abs(g.det) * diff * diff;
    }
  }
  return std::sqrt(total);
}

}  // namespace fracfem
