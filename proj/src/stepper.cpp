#include "fracfem/stepper.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace fracfem {

SchemeId scheme_from_string(std::string_view name) {
  if (name == "s1") return SchemeId::s1;
  if (name == "s2") return SchemeId::s2;
  if (name == "s3") return SchemeId::s3;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

const char* to_string(SchemeId scheme) {
  switch (scheme) {
    case SchemeId::s1: return "s1";
    case SchemeId::s2: return "s2";
    case SchemeId::s3: return "s3";
  }
  return "?";
}

struct TimeStepper::Impl {
  const FemSpace& space;
  const L1Kernel& kernel;
  const Problem& problem;
  SchemeId scheme;
  StepperOptions options;

  SparseMatrix mass;
  // c_tau * M + A (minus the drift operator when the problem has one),
  // before boundary conditions
  SparseMatrix base;
  bool banded = false;

  // constant-matrix path (s1/s3): system and factorization built once
  SparseMatrix system;
  std::unique_ptr<BandedLU> factor;
  bool system_ready = false;

  SolveReport last_report;

  Impl(const FemSpace& space, const L1Kernel& kernel, const Problem& problem,
       SchemeId scheme, StepperOptions options)
      : space(space), kernel(kernel), problem(problem), scheme(scheme),
        options(std::move(options)) {
    if (space.dim() != problem.dim) {
      throw std::invalid_argument("stepper: space/problem dimension mismatch");
    }
    mass = assemble_mass(space);
    base = SparseMatrix::add(assemble_stiffness(space), mass, kernel.scale());
    if (problem.has_drift()) {
      base = SparseMatrix::add(base, assemble_advection(space, problem.drift_x),
                               -1.0);
    }
    switch (this->options.solver) {
      case LinearSolverKind::automatic: banded = space.dim() == 1; break;
      case LinearSolverKind::banded: banded = true; break;
      case LinearSolverKind::cg: banded = false; break;
    }
  }

  void check_history(std::span<const std::vector<double>> history,
                     std::size_t n) const {
    if (n < 1) throw std::invalid_argument("stepper: step index must be >= 1");
    if (n > kernel.n_max()) {
      throw std::invalid_argument("stepper: step index exceeds kernel table");
    }
    if (history.size() < n) {
      throw std::invalid_argument("stepper: history too short");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (history[j].size() != static_cast<std::size_t>(space.num_dofs())) {
        throw std::invalid_argument("stepper: history vector of wrong size");
      }
    }
  }

  // -c_tau * M * sum_{j<n} b_{n-j} U^j, the memory part of the right side
  std::vector<double> history_rhs(std::span<const std::vector<double>> history,
                                  std::size_t n) const {
    const auto& a = kernel.a();
    std::vector<double> acc(space.num_dofs(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double b = j == 0 ? -a[n - 1] : a[n - j] - a[n - j - 1];
      const auto& uj = history[j];
      for (int k = 0; k < space.num_dofs(); ++k) acc[k] += b * uj[k];
    }
    std::vector<double> rhs = mass.multiply(acc);
    for (double& v : rhs) v *= -kernel.scale();
    return rhs;
  }

  std::vector<double> source_load(const std::vector<double>& z,
                                  std::size_t n) const {
    std::vector<double> rhs = nonlinear_load(space, z, problem.f);
    const double t = double(n) * kernel.tau();
    const std::vector<double> g =
        assemble_load(space, [&](double x, double y) { return problem.g(x, y, t); });
    for (int k = 0; k < space.num_dofs(); ++k) rhs[k] += g[k];
    return rhs;
  }

  std::vector<double> solve_with(const SparseMatrix& matrix,
                                 const BandedLU* lu,
                                 std::span<const double> rhs,
                                 std::span<const double> warm, std::size_t n) {
    std::vector<double> x;
    if (lu != nullptr) {
      x = lu->solve(rhs);
      const std::vector<double> ax = matrix.multiply(x);
      double rn = 0, bn = 0;
      for (int k = 0; k < matrix.size(); ++k) {
        const double d = rhs[k] - ax[k];
        rn += d * d;
        bn += rhs[k] * rhs[k];
      }
      last_report.iterations = 0;
      last_report.rel_residual = bn > 0 ? std::sqrt(rn / bn) : 0.0;
      last_report.converged = true;
    } else {
      auto [sol, report] = cg_solve(matrix, rhs, options.solver_tol,
                                    options.max_iterations, warm);
      last_report = report;
      if (!report.converged) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "linear solve failed at step %zu (%d iterations, "
                      "relative residual %.3e)",
                      n, report.iterations, report.rel_residual);
        throw solver_error(n, report, msg);
      }
      x = std::move(sol);
    }
    return x;
  }

  void ensure_constant_system() {
    if (system_ready) return;
    system = base;
    apply_dirichlet_matrix(system, space.constrained_dofs());
    if (banded) factor = std::make_unique<BandedLU>(system);
    system_ready = true;
  }

  // s1 (z = U^{n-1}) and s3 (z = extrapolant): constant matrix, f lagged
  std::vector<double> lagged_step(std::span<const std::vector<double>> history,
                                  std::size_t n, const std::vector<double>& z) {
    ensure_constant_system();
    std::vector<double> rhs = history_rhs(history, n);
    const std::vector<double> src = source_load(z, n);
    for (int k = 0; k < space.num_dofs(); ++k) rhs[k] += src[k];
    apply_dirichlet_rhs(rhs, space.constrained_dofs());
    return solve_with(system, factor.get(), rhs, history[n - 1], n);
  }

  // Newton-linearized solve: used for every s2 step and for the s3
  // starting value.
  std::vector<double> newton_step(std::span<const std::vector<double>> history,
                                  std::size_t n) {
    const std::vector<double>& z = history[n - 1];
    const SparseMatrix jac = assemble_weighted_mass(space, z, problem.f1);
    SparseMatrix matrix = SparseMatrix::add(base, jac, -1.0);
    apply_dirichlet_matrix(matrix, space.constrained_dofs());

    std::vector<double> rhs = history_rhs(history, n);
    const std::vector<double> src = source_load(z, n);
    const std::vector<double> jz = jac.multiply(z);
    for (int k = 0; k < space.num_dofs(); ++k) rhs[k] += src[k] - jz[k];
    apply_dirichlet_rhs(rhs, space.constrained_dofs());

    std::unique_ptr<BandedLU> lu;
    if (banded) lu = std::make_unique<BandedLU>(matrix);
    return solve_with(matrix, lu.get(), rhs, z, n);
  }
};

TimeStepper::TimeStepper(const FemSpace& space, const L1Kernel& kernel,
                         const Problem& problem, SchemeId scheme,
                         StepperOptions options)
    : impl_(std::make_unique<Impl>(space, kernel, problem, scheme,
                                   std::move(options))) {}

TimeStepper::~TimeStepper() = default;
TimeStepper::TimeStepper(TimeStepper&&) noexcept = default;

std::vector<double> TimeStepper::first_extrapolant(std::span<const double> u0) {
  std::vector<double> start(u0.begin(), u0.end());
  const std::vector<double> history[] = {std::move(start)};
  return impl_->newton_step(history, 1);
}

std::vector<double> TimeStepper::step(
    std::span<const std::vector<double>> history, std::size_t n) {
  impl_->check_history(history, n);
  switch (impl_->scheme) {
    case SchemeId::s1:
      return impl_->lagged_step(history, n, history[n - 1]);
    case SchemeId::s2:
      return impl_->newton_step(history, n);
    case SchemeId::s3: {
      if (n == 1) {
        const std::vector<double> hat = first_extrapolant(history[0]);
        return impl_->lagged_step(history, 1, hat);
      }
      std::vector<double> hat(impl_->space.num_dofs());
      const auto& u1 = history[n - 1];
      const auto& u2 = history[n - 2];
      for (int k = 0; k < impl_->space.num_dofs(); ++k) {
        hat[k] = 2.0 * u1[k] - u2[k];
      }
      return impl_->lagged_step(history, n, hat);
    }
  }
  throw std::logic_error("unreachable scheme");
}

const SolveReport& TimeStepper::last_report() const {
  return impl_->last_report;
}

std::vector<double> step_s1(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options) {
  TimeStepper stepper(space, kernel, problem, SchemeId::s1, options);
  return stepper.step(history, n);
}

std::vector<double> step_s2(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options) {
  TimeStepper stepper(space, kernel, problem, SchemeId::s2, options);
  return stepper.step(history, n);
}

std::vector<double> step_s3(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options) {
  if (n < 2) {
    throw std::invalid_argument("step_s3 needs n >= 2; use first_step_s3");
  }
  TimeStepper stepper(space, kernel, problem, SchemeId::s3, options);
  return stepper.step(history, n);
}

std::pair<std::vector<double>, std::vector<double>> first_step_s3(
    const FemSpace& space, const L1Kernel& kernel, std::span<const double> u0,
    const Problem& problem, const StepperOptions& options) {
  TimeStepper stepper(space, kernel, problem, SchemeId::s3, options);
  std::vector<double> hat = stepper.first_extrapolant(u0);
  const std::vector<double> history[] = {{u0.begin(), u0.end()}};
  std::vector<double> u1 = stepper.step(history, 1);
  return {std::move(hat), std::move(u1)};
}

RunResult run(const FemSpace& space, const L1Kernel& kernel, SchemeId scheme,
              const Problem& problem, std::size_t n_steps,
              const StepperOptions& options) {
  if (n_steps < 1) throw std::invalid_argument("run: need at least one step");
  if (kernel.n_max() < n_steps) {
    throw std::invalid_argument("run: kernel table shorter than the run");
  }
  const double tau = problem.T / double(n_steps);
  if (std::abs(kernel.tau() - tau) > 1e-12 * tau) {
    throw std::invalid_argument("run: kernel step does not match T / N");
  }

  RunResult result;
  result.history.reserve(n_steps + 1);
  result.history.push_back(interpolate_nodal(space, problem.u0));
  for (int c : space.constrained_dofs()) result.history.back()[c] = 0.0;

  const bool record = options.record_errors && bool(problem.u_exact);
  auto record_error = [&](std::size_t n) {
    const double t = double(n) * kernel.tau();
    result.errors.push_back(l2_error(
        space, result.history[n],
        [&](double x, double y) { return problem.u_exact(x, y, t); }));
  };
  if (record) record_error(0);

  TimeStepper stepper(space, kernel, problem, scheme, options);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    result.history.push_back(stepper.step(result.history, n));
    result.reports.push_back(stepper.last_report());
    if (record) record_error(n);
  }
  if (record) {
    result.final_error = result.errors.back();
    result.max_error = 0;
    for (std::size_t n = 1; n <= n_steps; ++n) {
      result.max_error = std::max(result.max_error, result.errors[n]);
    }
  }
  return result;
}

RunResult run(const FemSpace& space, SchemeId scheme, const Problem& problem,
              std::size_t n_steps, const StepperOptions& options) {
  L1Kernel kernel(problem.alpha, problem.T / double(n_steps), n_steps);
  return run(space, kernel, scheme, problem, n_steps, options);
}

}  // namespace fracfem
