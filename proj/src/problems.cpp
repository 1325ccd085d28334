#include "fracfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracfem {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("fractional order must lie in (0,1)");
  }
}

}  // namespace

double caputo_power(double sigma, double alpha, double t) {
  if (sigma < 0.0) throw std::invalid_argument("caputo_power: sigma < 0");
  if (sigma == 0.0) return 0.0;
  return std::tgamma(sigma + 1.0) / std::tgamma(sigma + 1.0 - alpha) *
         std::pow(t, sigma - alpha);
}

Problem huxley_problem(double alpha) {
  check_alpha(alpha);
  Problem p;
  p.name = "huxley2d";
  p.dim = 2;
  p.lo[0] = p.lo[1] = 0.0;
  p.hi[0] = p.hi[1] = 1.0;
  p.alpha = alpha;
  p.T = 1.0;
  auto profile = [](double s) { return (1.0 - s) * std::sin(s); };
  auto profile_dd = [](double s) {
    return -2.0 * std::cos(s) - (1.0 - s) * std::sin(s);
  };
  p.u_exact = [profile](double x, double y, double t) {
    return (1.0 + t * t * t) * profile(x) * profile(y);
  };
  p.u0 = [profile](double x, double y) { return profile(x) * profile(y); };
  p.f = [](double u, double, double) { return u * (1.0 - u) * (u - 1.0); };
  p.f1 = [](double u, double, double) { return -3.0 * u * u + 4.0 * u - 1.0; };
  p.g = [alpha, profile, profile_dd, f = p.f, u = p.u_exact](double x, double y,
                                                            double t) {
    const double spatial = profile(x) * profile(y);
    const double laplacian = (1.0 + t * t * t) * (profile_dd(x) * profile(y) +
                                                  profile(x) * profile_dd(y));
    return caputo_power(3.0, alpha, t) * spatial - laplacian -
           f(u(x, y, t), x, y);
  };
  p.lipschitz_note =
      "f(u) = u(1-u)(u-1) is C^1; Lipschitz on the bounded range of the "
      "exact solution (|u| <= 2 gives L <= 23).";
  return p;
}

Problem fisher_problem(double alpha, int dim) {
  check_alpha(alpha);
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("fisher_problem: dim must be 1 or 2");
  }
  Problem p;
  p.name = dim == 1 ? "fisher1d" : "fisher2d";
  p.dim = dim;
  p.lo[0] = p.lo[1] = 0.0;
  p.hi[0] = 1.0;
  p.hi[1] = dim == 2 ? 1.0 : 0.0;
  p.alpha = alpha;
  p.T = 1.0;
  const double pi = std::numbers::pi;
  auto spatial = [pi, dim](double x, double y) {
    double s = std::sin(pi * x);
    if (dim == 2) s *= std::sin(pi * y);
    return s;
  };
  p.u_exact = [spatial](double x, double y, double t) {
    return t * t * spatial(x, y);
  };
  p.u0 = [](double, double) { return 0.0; };
  p.f = [](double u, double, double) { return u * (1.0 - u); };
  p.f1 = [](double u, double, double) { return 1.0 - 2.0 * u; };
  p.g = [alpha, spatial, pi, dim, f = p.f](double x, double y, double t) {
    const double s = spatial(x, y);
    const double u = t * t * s;
    return caputo_power(2.0, alpha, t) * s + dim * pi * pi * t * t * s -
           f(u, x, y);
  };
  p.lipschitz_note =
      "f(u) = u(1-u) is C^1; Lipschitz on the bounded range of the exact "
      "solution (|u| <= 2 gives L <= 5).";
  return p;
}

Problem fokker_planck_problem(double alpha) {
  check_alpha(alpha);
  Problem p;
  p.name = "fokker-planck1d";
  p.dim = 1;
  p.lo[0] = 0.0;
  p.hi[0] = std::numbers::pi;
  p.alpha = alpha;
  p.T = 1.0;
  p.u_exact = [alpha](double x, double, double t) {
    return (std::pow(t, alpha) + t * t) * std::sin(x);
  };
  p.u0 = [](double, double) { return 0.0; };
  // potential exp(x), friction 1: reaction exp(x)u rides in the f slot
  p.f = [](double u, double x, double) { return std::exp(x) * u; };
  p.f1 = [](double, double x, double) { return std::exp(x); };
  p.drift_x = [](double x, double) { return std::exp(x); };
  p.g = [alpha](double x, double, double t) {
    const double temporal = std::pow(t, alpha) + t * t;
    const double dalpha =
        caputo_power(alpha, alpha, t) + caputo_power(2.0, alpha, t);
    const double ex = std::exp(x);
    return dalpha * std::sin(x) +
           temporal * (std::sin(x) - ex * std::cos(x) - ex * std::sin(x));
  };
  p.lipschitz_note =
      "linear reaction exp(x)u: globally Lipschitz in u with L = exp(pi).";
  return p;
}

std::vector<std::string> problem_names() {
  return {"huxley2d", "fisher1d", "fisher2d", "fokker-planck1d"};
}

Problem make_problem(const std::string& name, double alpha) {
  if (name == "huxley2d") return huxley_problem(alpha);
  if (name == "fisher1d") return fisher_problem(alpha, 1);
  if (name == "fisher2d") return fisher_problem(alpha, 2);
  if (name == "fokker-planck1d") return fokker_planck_problem(alpha);
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace fracfem
