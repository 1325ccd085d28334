#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracfem/driver.hpp"
#include "fracfem/l1.hpp"
#include "fracfem/problems.hpp"

namespace py = pybind11;

namespace {

py::dict summary_dict(const fracfem::SingleRunSummary& s) {
  py::dict d;
  d["error"] = s.error;
  d["final_error"] = s.final_error;
  d["max_error"] = s.max_error;
  d["dofs"] = s.dofs;
  d["tau"] = s.tau;
  d["iterations"] = s.total_iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "L1/FEM solver for time-fractional nonlinear parabolic problems";

  m.def("l1_weights", &fracfem::l1_weights, py::arg("alpha"), py::arg("n"),
        "L1 kernel weights a_0..a_{n-1}");
  m.def(
      "p_sequence",
      [](double alpha, std::size_t n) { return fracfem::p_sequence(alpha, n).p; },
      py::arg("alpha"), py::arg("n"), "complementary weights p_0..p_n");
  m.def("mittag_leffler", &fracfem::mittag_leffler, py::arg("alpha"),
        py::arg("z"), "E_alpha(z)");
  m.def("caputo_power", &fracfem::caputo_power, py::arg("sigma"),
        py::arg("alpha"), py::arg("t"),
        "Caputo derivative of t^sigma of order alpha");
  m.def("list_problems", &fracfem::problem_names);
  m.def(
      "run_single",
      [](const std::string& problem, const std::string& scheme, double alpha,
         int degree, std::size_t m_sub, std::size_t n_steps,
         const std::string& metric) {
        fracfem::ExperimentConfig config;
        config.problem = problem;
        config.scheme = fracfem::scheme_from_string(scheme);
        config.alpha = alpha;
        config.degree = degree;
        config.m = m_sub;
        config.n_steps = n_steps;
        config.metric = fracfem::metric_from_string(metric);
        return summary_dict(fracfem::run_single(config));
      },
      py::arg("problem"), py::arg("scheme") = "s1", py::arg("alpha") = 0.5,
      py::arg("degree") = 1, py::arg("m") = 8, py::arg("n_steps") = 8,
      py::arg("metric") = "final");
  m.def(
      "gronwall_verify",
      [](const std::vector<double>& alphas, std::size_t n_steps, int trials,
         bool corrupt_p) {
        fracfem::GronwallVerifyConfig config;
        if (!alphas.empty()) config.alphas = alphas;
        config.n_steps = n_steps;
        config.trials = trials;
        config.corrupt_p = corrupt_p;
        const auto result = fracfem::gronwall_verify(config);
        py::dict d;
        d["checks_run"] = result.checks_run;
        d["all_pass"] = result.all_pass();
        py::list failures;
        for (const auto& f : result.failures) {
          py::dict fd;
          fd["alpha"] = f.alpha;
          fd["n"] = f.n;
          fd["check"] = f.check;
          failures.append(fd);
        }
        d["failures"] = failures;
        return d;
      },
      py::arg("alphas") = std::vector<double>{}, py::arg("n_steps") = 64,
      py::arg("trials") = 20, py::arg("corrupt_p") = false);
}
