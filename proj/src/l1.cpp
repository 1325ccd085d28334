#include "fracfem/l1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracfem {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("fractional order must lie in (0,1)");
  }
}

}  // namespace

std::vector<double> l1_weights(double alpha, std::size_t n) {
  check_alpha(alpha);
  if (n == 0) throw std::invalid_argument("weight count must be positive");
  std::vector<double> a(n);
  const double s = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::pow(double(i + 1), s) - std::pow(double(i), s);
  }
  return a;
}

L1Kernel::L1Kernel(double alpha, double tau, std::size_t n_max)
    : alpha_(alpha), tau_(tau), n_max_(n_max) {
  check_alpha(alpha);
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  a_ = l1_weights(alpha, n_max + 1);
  scale_ = std::pow(tau, -alpha) / std::tgamma(2.0 - alpha);
}

BWeights b_weights(const L1Kernel& kernel, std::size_t n) {
  if (n < 1 || n > kernel.n_max()) {
    throw std::invalid_argument("b_weights: step index out of range");
  }
  BWeights w;
  w.n = n;
  w.b.resize(n + 1);
  const auto& a = kernel.a();
  w.b[0] = a[0];
  w.b[n] = -a[n - 1];
  for (std::size_t i = 1; i + 1 <= n; ++i) w.b[i] = a[i] - a[i - 1];
  return w;
}

double caputo_l1_apply(std::span<const double> history, const L1Kernel& kernel,
                       std::size_t n) {
  if (n < 1) throw std::invalid_argument("caputo_l1_apply: n must be >= 1");
  if (history.size() < n + 1) {
    throw std::invalid_argument("caputo_l1_apply: history too short");
  }
  const auto& a = kernel.a();
  double sum = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    sum += a[n - j] * (history[j] - history[j - 1]);
  }
  return kernel.scale() * sum;
}

std::vector<double> caputo_l1_apply(
    std::span<const std::vector<double>> history, const L1Kernel& kernel,
    std::size_t n) {
  if (n < 1) throw std::invalid_argument("caputo_l1_apply: n must be >= 1");
  if (history.size() < n + 1) {
    throw std::invalid_argument("caputo_l1_apply: history too short");
  }
  const std::size_t dim = history[0].size();
  const auto& a = kernel.a();
  std::vector<double> out(dim, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (history[j].size() != dim || history[j - 1].size() != dim) {
      throw std::invalid_argument("caputo_l1_apply: ragged history");
    }
    const double w = a[n - j];
    const auto& cur = history[j];
    const auto& prev = history[j - 1];
    for (std::size_t k = 0; k < dim; ++k) out[k] += w * (cur[k] - prev[k]);
  }
  for (double& v : out) v *= kernel.scale();
  return out;
}

PSequence p_sequence(double alpha, std::size_t n) {
  check_alpha(alpha);
  PSequence seq;
  seq.alpha = alpha;
  seq.p.resize(n + 1);
  seq.p[0] = 1.0;
  const std::vector<double> a = l1_weights(alpha, n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0;
    for (std::size_t j = 1; j <= k; ++j) s += (a[j - 1] - a[j]) * seq.p[k - j];
    seq.p[k] = s;
  }
  return seq;
}

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("mittag_leffler: order must be positive");
  }
  if (z == 0.0) return 1.0;
  const double ln_abs_z = std::log(std::abs(z));
  const bool negative = z < 0.0;
  double sum = 1.0;  // k = 0 term
  double prev_mag = 1.0;
  constexpr std::size_t kMaxTerms = 10000;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    const double mag = std::exp(double(k) * ln_abs_z - std::lgamma(1.0 + double(k) * alpha));
    const double term = (negative && (k % 2 == 1)) ? -mag : mag;
    if (std::isinf(mag)) {
      if (negative) {
        throw convergence_error("mittag_leffler: series overflow for negative argument");
      }
      return std::numeric_limits<double>::infinity();
    }
    sum += term;
    if (std::isinf(sum)) return sum;
    // stop only past the hump, once terms shrink
    if (mag <= prev_mag && mag <= 1e-14 * std::abs(sum)) return sum;
    prev_mag = mag;
  }
  throw convergence_error("mittag_leffler: term budget exceeded");
}

void GronwallPremise::validate() const {
  check_alpha(alpha);
  if (!(tau > 0.0)) throw std::invalid_argument("premise: tau must be positive");
  if (omega.empty()) throw std::invalid_argument("premise: omega is empty");
  if (g.size() + 1 != omega.size()) {
    throw std::invalid_argument("premise: g must have one entry per step");
  }
  for (double v : omega) {
    if (!(v >= 0.0)) throw std::invalid_argument("premise: omega must be nonnegative");
  }
  for (double v : g) {
    if (!(v >= 0.0)) throw std::invalid_argument("premise: g must be nonnegative");
  }
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw std::invalid_argument("premise: lambda factors must be nonnegative");
  }
}

double gronwall_lambda(const GronwallPremise& premise) {
  return premise.lambda1 +
         premise.lambda2 / (2.0 - std::pow(2.0, 1.0 - premise.alpha));
}

double gronwall_bound(const GronwallPremise& premise, std::size_t n) {
  premise.validate();
  if (n < 1 || n > premise.steps()) {
    throw std::invalid_argument("gronwall_bound: step index out of range");
  }
  const double tn = double(n) * premise.tau;
  double gmax = 0;
  for (std::size_t j = 1; j <= n; ++j) gmax = std::max(gmax, premise.g[j - 1]);
  const double lambda = gronwall_lambda(premise);
  const double factor =
      premise.omega[0] +
      std::pow(tn, premise.alpha) / std::tgamma(1.0 + premise.alpha) * gmax;
  return 2.0 * factor *
         mittag_leffler(premise.alpha, 2.0 * lambda * std::pow(tn, premise.alpha));
}

std::vector<GronwallStepReport> gronwall_check(const GronwallPremise& premise) {
  premise.validate();
  const std::size_t steps = premise.steps();
  L1Kernel kernel(premise.alpha, premise.tau, steps == 0 ? 1 : steps);
  std::vector<GronwallStepReport> reports;
  reports.reserve(steps);
  bool ok_so_far = true;
  for (std::size_t n = 1; n <= steps; ++n) {
    GronwallStepReport r;
    r.n = n;
    r.lhs = caputo_l1_apply(std::span<const double>(premise.omega), kernel, n);
    r.rhs = premise.lambda1 * premise.omega[n] +
            premise.lambda2 * premise.omega[n - 1] + premise.g[n - 1];
    const double slack = 1e-12 * (1.0 + std::abs(r.rhs));
    r.premise_ok = r.lhs <= r.rhs + slack;
    ok_so_far = ok_so_far && r.premise_ok;
    r.premise_ok_so_far = ok_so_far;
    r.bound = gronwall_bound(premise, n);
    r.bound_ok = premise.omega[n] <= r.bound + 1e-12 * (1.0 + std::abs(r.bound));
    reports.push_back(r);
  }
  return reports;
}

std::vector<bool> coercivity_check(
    std::span<const std::vector<double>> history, const L1Kernel& kernel) {
  if (history.empty()) return {};
  const std::size_t dim = history[0].size();
  const std::size_t steps = history.size() - 1;
  std::vector<double> norms2(history.size());
  for (std::size_t j = 0; j < history.size(); ++j) {
    if (history[j].size() != dim) {
      throw std::invalid_argument("coercivity_check: ragged history");
    }
    double s = 0;
    for (double v : history[j]) s += v * v;
    norms2[j] = s;
  }
  std::vector<bool> ok(steps);
  for (std::size_t n = 1; n <= steps; ++n) {
    const std::vector<double> d = caputo_l1_apply(history, kernel, n);
    double lhs = 0;
    for (std::size_t k = 0; k < dim; ++k) lhs += d[k] * history[n][k];
    const double rhs =
        0.5 * caputo_l1_apply(std::span<const double>(norms2), kernel, n);
    ok[n - 1] = lhs >= rhs - 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs));
  }
  return ok;
}

}  // namespace fracfem
