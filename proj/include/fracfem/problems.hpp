#pragma once

#include <string>
#include <vector>

#include "fracfem/fem.hpp"

namespace fracfem {

/// Caputo derivative of t^sigma, order alpha in (0,1):
///   0 for sigma = 0, else Gamma(sigma+1)/Gamma(sigma+1-alpha) t^{sigma-alpha}.
double caputo_power(double sigma, double alpha, double t);

/// A manufactured benchmark instance: exact solution, analytically derived
/// source, nonlinearity f and its u-derivative f1. The exact solution
/// vanishes on the domain boundary for all t, and
///   D^alpha u - Lu - f(u) - g = 0
/// holds pointwise, where L is the Laplacian plus (for the drift variant)
/// the first-order term drift_x(x) d_x u.
struct Problem {
  std::string name;
  int dim = 1;
  double lo[2] = {0, 0};
  double hi[2] = {1, 0};
  double alpha = 0.5;
  double T = 1.0;

  PointwiseFn u_exact;    // (x, y, t)
  ScalarField u0;         // (x, y)
  PointwiseFn f;          // (u, x, y)
  PointwiseFn f1;         // df/du at (u, x, y)
  PointwiseFn g;          // (x, y, t), manufactured source

  /// Coefficient of d_x u, empty unless present. The drift belongs to the
  /// linear spatial operator and is discretized implicitly by every
  /// scheme; only f goes through the per-scheme linearization.
  ScalarField drift_x;

  std::string lipschitz_note;

  bool has_drift() const { return static_cast<bool>(drift_x); }
  double u_exact_at(double x, double y, double t) const { return u_exact(x, y, t); }
};

/// 2D Huxley benchmark on the unit square, T = 1:
/// f(u) = u(1-u)(u-1), exact u = (1+t^3)(1-x)sin(x)(1-y)sin(y).
Problem huxley_problem(double alpha);

/// Fisher-type benchmark with f(u) = u(1-u) and exact solution
/// t^2 * prod_i sin(pi x_i), restated on the unit interval (dim 1) or
/// unit square (dim 2).
Problem fisher_problem(double alpha, int dim);

/// Linear Fokker-Planck benchmark on (0, pi), T = 1, potential exp(x),
/// friction 1: reaction exp(x) u sits in the f slot, drift exp(x) d_x u in
/// drift_x, exact u = (t^alpha + t^2) sin(x). The time derivative behaves
/// like alpha t^{alpha-1} near t = 0, so temporal accuracy degrades to
/// O(tau^alpha) in the max-over-steps norm.
Problem fokker_planck_problem(double alpha);

/// Registry: "huxley2d", "fisher1d", "fisher2d", "fokker-planck1d".
std::vector<std::string> problem_names();
Problem make_problem(const std::string& name, double alpha);

}  // namespace fracfem
