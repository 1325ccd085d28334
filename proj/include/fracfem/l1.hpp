#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracfem {

/// Thrown when a truncated series fails to reach its stop tolerance
/// within the term budget.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Convolution weights a_i = (i+1)^{1-alpha} - i^{1-alpha}, i = 0..n-1.
/// Strictly decreasing from a_0 = 1 towards 0.
std::vector<double> l1_weights(double alpha, std::size_t n);

/// Discrete fractional-derivative kernel of order alpha on a uniform grid
/// with step tau. Holds the weight table a_0..a_{n_max}; immutable.
class L1Kernel {
 public:
  L1Kernel(double alpha, double tau, std::size_t n_max);

  double alpha() const { return alpha_; }
  double tau() const { return tau_; }
  std::size_t n_max() const { return n_max_; }
  const std::vector<double>& a() const { return a_; }
  double a(std::size_t i) const { return a_.at(i); }

  /// tau^{-alpha} / Gamma(2 - alpha); the factor in front of the sum.
  double scale() const { return scale_; }

 private:
  double alpha_;
  double tau_;
  std::size_t n_max_;
  double scale_;
  std::vector<double> a_;
};

/// Rearranged weights so that the discrete derivative becomes a direct
/// convolution on values: b_0 = a_0, b_n = -a_{n-1},
/// b_{n-j} = a_{n-j} - a_{n-j-1} for 1 <= j <= n-1. Sum is exactly 0.
struct BWeights {
  std::size_t n = 0;
  std::vector<double> b;  // b_0..b_n
};

BWeights b_weights(const L1Kernel& kernel, std::size_t n);

/// Discrete Caputo derivative of a scalar history v^0..v^n at step n:
///   tau^{-alpha}/Gamma(2-alpha) * sum_{j=1}^{n} a_{n-j} (v^j - v^{j-1}).
double caputo_l1_apply(std::span<const double> history, const L1Kernel& kernel,
                       std::size_t n);

/// Entrywise variant for vector-valued histories.
std::vector<double> caputo_l1_apply(
    std::span<const std::vector<double>> history, const L1Kernel& kernel,
    std::size_t n);

/// Complementary kernel sequence: p_0 = 1,
/// p_n = sum_{j=1}^{n} (a_{j-1} - a_j) p_{n-j}. All entries lie in (0,1]
/// and satisfy sum_{j=k}^{n} p_{n-j} a_{j-k} = 1.
struct PSequence {
  double alpha = 0;
  std::vector<double> p;  // p_0..p_n
};

PSequence p_sequence(double alpha, std::size_t n);

/// E_alpha(z) = sum_{k>=0} z^k / Gamma(1 + k*alpha), summed until the
/// running term falls below 1e-14 relative; throws convergence_error if
/// 10^4 terms are not enough. Overflow of the sum returns +inf.
double mittag_leffler(double alpha, double z);

/// Hypothesis data for the discrete fractional Gronwall recurrence
///   D^alpha omega^n <= lambda1 omega^n + lambda2 omega^{n-1} + g^n.
/// omega holds omega^0..omega^N; g holds g^1..g^N (one entry per step).
struct GronwallPremise {
  double alpha = 0.5;
  double tau = 1.0;
  std::vector<double> omega;
  std::vector<double> g;
  double lambda1 = 0;
  double lambda2 = 0;

  std::size_t steps() const { return omega.empty() ? 0 : omega.size() - 1; }
  void validate() const;
};

/// lambda1 + lambda2 / (2 - 2^{1-alpha}).
double gronwall_lambda(const GronwallPremise& premise);

/// The a-priori bound at step n:
///   2 (omega^0 + t_n^alpha/Gamma(1+alpha) * max_{j<=n} g^j)
///     * E_alpha(2 lambda t_n^alpha).
double gronwall_bound(const GronwallPremise& premise, std::size_t n);

struct GronwallStepReport {
  std::size_t n = 0;
  double lhs = 0;            // D^alpha omega^n
  double rhs = 0;            // lambda1 omega^n + lambda2 omega^{n-1} + g^n
  bool premise_ok = false;   // lhs <= rhs within slack
  bool premise_ok_so_far = false;  // premise held at every step <= n
  double bound = 0;
  bool bound_ok = false;     // omega^n <= bound within slack
};

/// Evaluates the recurrence premise and the bound at every step. The bound
/// is only meaningful at steps where premise_ok_so_far is true; the report
/// leaves that judgement to the caller.
std::vector<GronwallStepReport> gronwall_check(const GronwallPremise& premise);

/// Checks <D^alpha e^n, e^n> >= 1/2 D^alpha ||e^n||^2 (Euclidean pairing)
/// for n = 1..N; returns one flag per step.
std::vector<bool> coercivity_check(
    std::span<const std::vector<double>> history, const L1Kernel& kernel);

}  // namespace fracfem
