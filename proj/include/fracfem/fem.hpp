#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fracfem/mesh.hpp"
#include "fracfem/sparse.hpp"

namespace fracfem {

/// Scalar field on the domain; the second coordinate is ignored in 1D.
using ScalarField = std::function<double(double, double)>;

/// Pointwise nonlinearity f(u, x, y).
using PointwiseFn = std::function<double(double, double, double)>;

/// Quadrature on the reference element (unit interval or unit triangle
/// {(0,0),(1,0),(0,1)}). Weights sum to the reference measure.
struct QuadratureRule {
  int dim = 1;
  int degree = 0;  // exact for polynomials up to this total degree
  std::vector<double> points;   // dim doubles per point
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

QuadratureRule interval_gauss(int npoints);   // degree 2*npoints - 1
QuadratureRule triangle_rule(int degree);     // supports degree <= 6

/// Continuous Lagrange space of degree 1 or 2 on a Mesh, with homogeneous
/// Dirichlet constraints on the geometric boundary. Owns a copy of the
/// mesh. P2 adds edge-midpoint DOFs; in 1D the DOFs are numbered by
/// coordinate so assembled operators stay banded.
class FemSpace {
 public:
  FemSpace(Mesh mesh, int degree);

  const Mesh& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int dim() const { return mesh_.dim; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_element() const { return dofs_per_element_; }

  std::span<const int> element_dofs(int e) const {
    return {element_dofs_.data() + e * dofs_per_element_,
            static_cast<std::size_t>(dofs_per_element_)};
  }
  double dof_coord(int dof, int axis) const { return dof_coords_[2 * dof + axis]; }
  std::span<const int> constrained_dofs() const { return constrained_; }
  std::span<const int> free_dofs() const { return free_; }
  bool is_constrained(int dof) const { return constrained_mask_[dof] != 0; }

  const QuadratureRule& quadrature() const { return quad_; }
  const QuadratureRule& error_quadrature() const { return err_quad_; }

  /// Shape function values (and reference gradients) at a reference point.
  void shape_values(const double* ref, double* values) const;
  void shape_gradients(const double* ref, double* grads) const;  // dim per fn

 private:
  Mesh mesh_;
  int degree_;
  int num_dofs_ = 0;
  int dofs_per_element_ = 0;
  std::vector<int> element_dofs_;
  std::vector<double> dof_coords_;  // 2 per dof, y = 0 in 1D
  std::vector<int> constrained_;
  std::vector<int> free_;
  std::vector<char> constrained_mask_;
  QuadratureRule quad_;
  QuadratureRule err_quad_;
};

/// Coefficient vector with entry i = u(dof_coords[i]).
std::vector<double> interpolate_nodal(const FemSpace& space,
                                      const ScalarField& u);

/// (i,j) = integral grad(phi_i) . grad(phi_j). Symmetric, PD on free DOFs.
SparseMatrix assemble_stiffness(const FemSpace& space);

/// (i,j) = integral phi_i phi_j. Symmetric positive definite.
SparseMatrix assemble_mass(const FemSpace& space);

/// (i,j) = integral w(u_h(x), x) phi_i phi_j with u_h built from U.
SparseMatrix assemble_weighted_mass(const FemSpace& space,
                                    std::span<const double> u,
                                    const PointwiseFn& w);

/// (i,j) = integral b(x) d_x(phi_j) phi_i; non-symmetric drift operator.
SparseMatrix assemble_advection(const FemSpace& space, const ScalarField& b);

/// entry i = integral w(x) phi_i.
std::vector<double> assemble_load(const FemSpace& space, const ScalarField& w);

/// entry i = integral f(u_h(x), x) phi_i with u_h evaluated at quadrature
/// points from the coefficient vector (consistent Galerkin treatment).
std::vector<double> nonlinear_load(const FemSpace& space,
                                   std::span<const double> u,
                                   const PointwiseFn& f);

/// entry i = integral b(x) d_x(u_h) phi_i.
std::vector<double> advection_load(const FemSpace& space,
                                   std::span<const double> u,
                                   const ScalarField& b);

/// Symmetric elimination of homogeneous Dirichlet DOFs: zero the
/// constrained rows and columns, put 1 on the diagonal, zero the rhs
/// entries. The free block is untouched, so SPD systems stay SPD.
void apply_dirichlet(SparseMatrix& a, std::span<double> rhs,
                     std::span<const int> constrained);
void apply_dirichlet_matrix(SparseMatrix& a, std::span<const int> constrained);
void apply_dirichlet_rhs(std::span<double> rhs,
                         std::span<const int> constrained);

/// || u_h - exact ||_{L2} using the space's error quadrature rule.
double l2_error(const FemSpace& space, std::span<const double> u,
                const ScalarField& exact);

}  // namespace fracfem
