#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracfem/fem.hpp"
#include "fracfem/l1.hpp"
#include "fracfem/problems.hpp"

namespace fracfem {

/// The three linearizations of the source term: previous value (s1),
/// first-order Taylor at the previous value (s2), and two-point
/// extrapolation 2 U^{n-1} - U^{n-2} (s3).
enum class SchemeId { s1, s2, s3 };

SchemeId scheme_from_string(std::string_view name);
const char* to_string(SchemeId scheme);

enum class LinearSolverKind { automatic, cg, banded };

struct StepperOptions {
  double solver_tol = 1e-12;
  int max_iterations = 0;  // 0 selects the cg_solve default
  LinearSolverKind solver = LinearSolverKind::automatic;
  bool record_errors = true;
};

/// Raised when the per-step linear solve fails; carries the step index.
struct solver_error : std::runtime_error {
  solver_error(std::size_t step, const SolveReport& report, std::string msg)
      : std::runtime_error(std::move(msg)), step(step), report(report) {}
  std::size_t step;
  SolveReport report;
};

struct RunResult {
  std::vector<std::vector<double>> history;  // U^0..U^N
  std::vector<double> errors;   // L2 error at each t_n (empty if no exact)
  double final_error = 0;       // at t_N
  double max_error = 0;         // over 1 <= n <= N
  std::vector<SolveReport> reports;  // one per solved step
};

/// Drives one scheme on one problem. Assembles mass/stiffness (and drift)
/// once; the s1/s3 system matrix and its factorization are cached across
/// steps, the Newton scheme rebuilds its matrix every step.
class TimeStepper {
 public:
  TimeStepper(const FemSpace& space, const L1Kernel& kernel,
              const Problem& problem, SchemeId scheme,
              StepperOptions options = {});
  ~TimeStepper();
  TimeStepper(TimeStepper&&) noexcept;

  /// Computes U^n from U^0..U^{n-1}. For s3 with n == 1 this solves the
  /// auxiliary Newton system first (see first_extrapolant).
  std::vector<double> step(std::span<const std::vector<double>> history,
                           std::size_t n);

  /// The Newton-linearized one-step solution used by s3 to start; set
  /// after the first s3 step (or by calling it directly).
  std::vector<double> first_extrapolant(std::span<const double> u0);

  const SolveReport& last_report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot wrappers around TimeStepper for the individual schemes.
std::vector<double> step_s1(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options = {});
std::vector<double> step_s2(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options = {});
std::vector<double> step_s3(const FemSpace& space, const L1Kernel& kernel,
                            std::span<const std::vector<double>> history,
                            const Problem& problem, std::size_t n,
                            const StepperOptions& options = {});

/// The s3 starting step: returns (hat U^1, U^1).
std::pair<std::vector<double>, std::vector<double>> first_step_s3(
    const FemSpace& space, const L1Kernel& kernel, std::span<const double> u0,
    const Problem& problem, const StepperOptions& options = {});

/// Runs N steps from U^0 = nodal interpolant of the initial datum.
/// Requires kernel.tau == problem.T / N and kernel.n_max >= N.
RunResult run(const FemSpace& space, const L1Kernel& kernel, SchemeId scheme,
              const Problem& problem, std::size_t n_steps,
              const StepperOptions& options = {});

/// Convenience overload that builds the kernel with tau = T / N.
RunResult run(const FemSpace& space, SchemeId scheme, const Problem& problem,
              std::size_t n_steps, const StepperOptions& options = {});

}  // namespace fracfem
