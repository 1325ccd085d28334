// Command-line front end: single runs, convergence sweeps, Gronwall
// toolbox verification, and reproduction of the published tables.
//
// Exit codes: 0 success, 2 usage / configuration error, 3 numerical
// failure (solver breakdown, series divergence, failed verification).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracfem/driver.hpp"

#ifndef FRACFEM_DATA_FILE
#define FRACFEM_DATA_FILE "data/reference_tables.csv"
#endif

namespace {

using namespace fracfem;

struct CliFlags {
  std::string config_path;
  std::string problem;
  std::string scheme;
  double alpha = 0;
  int degree = 0;
  std::size_t m = 0;
  std::size_t n_steps = 0;
  std::string metric;
  double tol = 0;
  std::string out;
};

// Attaches the shared experiment flags to a subcommand and returns the
// option pointers so overrides can be detected after parsing.
struct ExperimentOptions {
  CLI::Option* problem;
  CLI::Option* scheme;
  CLI::Option* alpha;
  CLI::Option* degree;
  CLI::Option* m;
  CLI::Option* n_steps;
  CLI::Option* metric;
  CLI::Option* tol;
};

ExperimentOptions add_experiment_flags(CLI::App* cmd, CliFlags& flags) {
  ExperimentOptions opts{};
  cmd->add_option("--config", flags.config_path,
                  "key=value config file; explicit flags override it");
  opts.problem = cmd->add_option("--problem", flags.problem, "problem name");
  opts.scheme =
      cmd->add_option("--scheme", flags.scheme, "time scheme: s1, s2 or s3");
  opts.alpha = cmd->add_option("--alpha", flags.alpha, "fractional order");
  opts.degree = cmd->add_option("--degree", flags.degree, "FEM degree: 1 or 2");
  opts.m = cmd->add_option("--m", flags.m, "mesh subdivisions per axis");
  opts.n_steps = cmd->add_option("--n-steps", flags.n_steps, "time steps");
  opts.metric =
      cmd->add_option("--metric", flags.metric, "error metric: final or max");
  opts.tol = cmd->add_option("--tol", flags.tol, "linear solver tolerance");
  cmd->add_option("--out", flags.out, "CSV output path (default: stdout)");
  return opts;
}

ExperimentConfig resolve_config(const CliFlags& flags,
                                const ExperimentOptions& opts) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = load_config_file(flags.config_path);
  if (opts.problem->count() > 0) config.problem = flags.problem;
  if (opts.scheme->count() > 0) {
    try {
      config.scheme = scheme_from_string(flags.scheme);
    } catch (const std::invalid_argument& e) {
      throw usage_error(e.what());
    }
  }
  if (opts.alpha->count() > 0) config.alpha = flags.alpha;
  if (opts.degree->count() > 0) config.degree = flags.degree;
  if (opts.m->count() > 0) config.m = flags.m;
  if (opts.n_steps->count() > 0) config.n_steps = flags.n_steps;
  if (opts.metric->count() > 0) config.metric = metric_from_string(flags.metric);
  if (opts.tol->count() > 0) config.solver_tol = flags.tol;
  if (!flags.out.empty()) config.out = flags.out;
  config.validate();
  return config;
}

// Writes `body(stream)` to the path, or to stdout when the path is empty.
template <typename Body>
void emit(const std::string& path, Body&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw usage_error("cannot open output file: " + path);
  body(out);
}

std::string fmt_order(const std::optional<double>& order) {
  if (!order) return "--";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", *order);
  return buf;
}

void print_table(const TableResult& result) {
  std::printf("table %d (%s)\n", result.table,
              result.scale == Scale::full ? "full" : "desk");
  std::printf("%-16s %6s %7s  %12s %8s  %12s %9s  %11s\n", "block", "m", "N",
              "error", "order", "ref_error", "ref_order", "rel_dev");
  for (const auto& row : result.rows) {
    const std::string ref_error =
        row.ref_error ? format_sci(*row.ref_error) : "--";
    const std::string rel_dev =
        row.ref_error
            ? format_sci(std::abs(row.error - *row.ref_error) / *row.ref_error)
            : "--";
    std::printf("%-16s %6zu %7zu  %12s %8s  %12s %9s  %11s\n",
                row.block.c_str(), row.m, row.n_steps,
                format_sci(row.error).c_str(), fmt_order(row.order).c_str(),
                ref_error.c_str(), fmt_order(row.ref_order).c_str(),
                rel_dev.c_str());
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Galerkin FEM + L1 stepping for time-fractional nonlinear "
               "parabolic problems"};
  app.require_subcommand(1);

  CliFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "single experiment");
  const ExperimentOptions run_opts = add_experiment_flags(run_cmd, run_flags);

  CliFlags sweep_flags;
  std::string axis_name = "temporal";
  std::vector<std::size_t> levels;
  double time_power = 0.0;
  int sweep_jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "convergence-rate sweep");
  const ExperimentOptions sweep_opts =
      add_experiment_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--axis", axis_name, "temporal or spatial");
  sweep_cmd->add_option("--levels", levels,
                        "refinement levels, e.g. --levels 10,20,40")
      ->delimiter(',');
  sweep_cmd->add_option("--time-power", time_power,
                        "spatial sweeps set N = round(m^p); 0 keeps n-steps");
  sweep_cmd->add_option("--jobs", sweep_jobs, "concurrent runs");

  GronwallVerifyConfig gronwall_config;
  std::vector<double> gronwall_alphas;
  std::string gronwall_out;
  auto* gronwall_cmd =
      app.add_subcommand("gronwall", "verify the discrete Gronwall toolbox");
  gronwall_cmd->add_option("--alpha", gronwall_alphas,
                           "fractional orders (default 0.25,0.5,0.75)")
      ->delimiter(',');
  gronwall_cmd->add_option("--n-steps", gronwall_config.n_steps, "steps");
  gronwall_cmd->add_option("--lambda1", gronwall_config.lambda1, "lambda_1");
  gronwall_cmd->add_option("--lambda2", gronwall_config.lambda2, "lambda_2");
  gronwall_cmd->add_option("--trials", gronwall_config.trials,
                           "randomized coercivity trials per alpha");
  gronwall_cmd->add_option("--horizon", gronwall_config.horizon, "time horizon");
  gronwall_cmd->add_option("--seed", gronwall_config.seed, "RNG seed");
  gronwall_cmd->add_flag("--corrupt-p", gronwall_config.corrupt_p,
                         "fault injection: perturb one p-weight");
  gronwall_cmd->add_option("--out", gronwall_out, "report output path");

  int table_id = 1;
  std::string scale_name = "desk";
  std::string data_path = FRACFEM_DATA_FILE;
  std::string table_out;
  int table_jobs = 1;
  auto* table_cmd =
      app.add_subcommand("table", "reproduce a published convergence table");
  table_cmd->add_option("--table", table_id, "table id: 1, 2 or 5");
  table_cmd->add_option("--scale", scale_name, "desk or full");
  table_cmd->add_option("--data", data_path, "reference value CSV");
  table_cmd->add_option("--jobs", table_jobs, "concurrent runs");
  table_cmd->add_option("--out", table_out, "CSV output path");

  auto* list_cmd = app.add_subcommand("list-problems", "registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // prints help or the parse error
  }

  if (run_cmd->parsed()) {
    const ExperimentConfig config = resolve_config(run_flags, run_opts);
    const SingleRunSummary summary = run_single(config);
    emit(config.out, [&](std::ostream& out) { write_csv(summary, out); });
    if (!config.out.empty()) {
      std::printf("%s %s alpha=%g degree=%d m=%zu N=%zu: %s error %s\n",
                  config.problem.c_str(), to_string(config.scheme),
                  config.alpha, config.degree, config.m, config.n_steps,
                  to_string(config.metric), format_sci(summary.error).c_str());
    }
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const ExperimentConfig base = resolve_config(sweep_flags, sweep_opts);
    const SweepAxis axis = axis_name == "temporal"  ? SweepAxis::temporal
                           : axis_name == "spatial" ? SweepAxis::spatial
                                                    : throw usage_error(
                                                          "unknown axis: " +
                                                          axis_name);
    if (levels.empty()) {
      levels = axis == SweepAxis::temporal
                   ? std::vector<std::size_t>{10, 20, 40, 80}
                   : std::vector<std::size_t>{4, 8, 16};
    }
    const RateTable table =
        convergence_sweep(base, axis, levels, time_power, sweep_jobs);
    emit(base.out, [&](std::ostream& out) { write_csv(table, out); });
    if (table.floor_suspected) {
      std::fprintf(stderr,
                   "warning: errors look floored (solver tolerance or "
                   "dominant other-axis error); orders are unreliable\n");
    }
    return 0;
  }

  if (gronwall_cmd->parsed()) {
    if (!gronwall_alphas.empty()) gronwall_config.alphas = gronwall_alphas;
    const GronwallVerifyResult result = gronwall_verify(gronwall_config);
    emit(gronwall_out, [&](std::ostream& out) { write_report(result, out); });
    return result.all_pass() ? 0 : 3;
  }

  if (table_cmd->parsed()) {
    const Scale scale = scale_from_string(scale_name);
    if (table_id == 2 && scale == Scale::full) {
      std::fprintf(stderr,
                   "warning: full scale adds the m=40 mesh (~260k dofs); "
                   "expect a long run\n");
    }
    const TableResult result =
        reproduce_table(table_id, scale, table_jobs, data_path);
    print_table(result);
    if (!table_out.empty()) {
      emit(table_out, [&](std::ostream& out) { write_csv(result, out); });
    }
    return 0;
  }

  if (list_cmd->parsed()) {
    for (const auto& name : problem_names()) std::printf("%s\n", name.c_str());
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
