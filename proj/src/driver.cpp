#include "fracfem/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>
#include <thread>

#include "fracfem/mesh.hpp"

namespace fracfem {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw usage_error("bad numeric value for '" + key + "': " + value);
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v < 0 || v != std::floor(v)) {
    throw usage_error("expected a nonnegative integer for '" + key + "': " + value);
  }
  return static_cast<std::size_t>(v);
}

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the
// first failure. Row order of any shared output is the caller's concern.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(jobs, count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ErrorMetric metric_from_string(std::string_view name) {
  if (name == "final") return ErrorMetric::final;
  if (name == "max") return ErrorMetric::max;
  throw usage_error("unknown metric: " + std::string(name));
}

const char* to_string(ErrorMetric metric) {
  return metric == ErrorMetric::final ? "final" : "max";
}

Scale scale_from_string(std::string_view name) {
  if (name == "desk") return Scale::desk;
  if (name == "full") return Scale::full;
  throw usage_error("unknown scale: " + std::string(name));
}

void ExperimentConfig::validate() const {
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end()) {
    throw usage_error("unknown problem: " + problem);
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw usage_error("alpha must lie in (0,1)");
  }
  if (degree != 1 && degree != 2) throw usage_error("degree must be 1 or 2");
  if (m < 1) throw usage_error("m must be >= 1");
  if (n_steps < 1) throw usage_error("n-steps must be >= 1");
  if (!(solver_tol > 0.0)) throw usage_error("tol must be positive");
}

ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw usage_error("config line is not key=value: " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "problem") {
      config.problem = value;
    } else if (key == "scheme") {
      try {
        config.scheme = scheme_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
      }
    } else if (key == "alpha") {
      config.alpha = parse_double(key, value);
    } else if (key == "degree") {
      config.degree = static_cast<int>(parse_size(key, value));
    } else if (key == "m") {
      config.m = parse_size(key, value);
    } else if (key == "n-steps" || key == "n_steps") {
      config.n_steps = parse_size(key, value);
    } else if (key == "metric") {
      config.metric = metric_from_string(value);
    } else if (key == "tol") {
      config.solver_tol = parse_double(key, value);
    } else if (key == "out") {
      config.out = value;
    } else {
      throw usage_error("unknown config key: " + key);
    }
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file: " + path);
  return load_config(in);
}

SingleRunSummary run_single(const ExperimentConfig& config) {
  config.validate();
  const Problem problem = make_problem(config.problem, config.alpha);
  const Mesh mesh =
      problem.dim == 1
          ? interval_mesh(problem.lo[0], problem.hi[0], static_cast<int>(config.m))
          : rect_tri_mesh(problem.lo[0], problem.hi[0], problem.lo[1],
                          problem.hi[1], static_cast<int>(config.m));
  const FemSpace space(mesh, config.degree);
  StepperOptions options;
  options.solver_tol = config.solver_tol;
  const RunResult result =
      run(space, config.scheme, problem, config.n_steps, options);

  SingleRunSummary summary;
  summary.config = config;
  summary.dofs = static_cast<std::size_t>(space.num_dofs());
  summary.tau = problem.T / double(config.n_steps);
  summary.final_error = result.final_error;
  summary.max_error = result.max_error;
  summary.error = config.metric == ErrorMetric::final ? result.final_error
                                                      : result.max_error;
  for (const auto& report : result.reports) {
    summary.total_iterations += static_cast<std::size_t>(report.iterations);
  }
  return summary;
}

std::optional<double> RateTable::tail_order() const {
  if (rows.empty()) return std::nullopt;
  return rows.back().order;
}

RateTable convergence_sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const std::size_t> levels,
                            double time_power, int jobs) {
  if (levels.size() < 2) throw usage_error("sweep needs at least two levels");
  const std::size_t ratio = levels[1] / levels[0];
  if (ratio < 2 || levels[1] % levels[0] != 0) {
    throw usage_error("sweep levels must refine by a fixed integer ratio");
  }
  for (std::size_t i = 1; i + 1 < levels.size(); ++i) {
    if (levels[i + 1] != levels[i] * ratio) {
      throw usage_error("sweep levels must refine by a fixed integer ratio");
    }
  }

  RateTable table;
  table.base = base;
  table.axis = axis;
  table.rows.resize(levels.size());
  parallel_for(levels.size(), jobs, [&](std::size_t i) {
    ExperimentConfig config = base;
    if (axis == SweepAxis::temporal) {
      config.n_steps = levels[i];
    } else {
      config.m = levels[i];
      if (time_power > 0.0) {
        config.n_steps = static_cast<std::size_t>(
            std::llround(std::pow(double(levels[i]), time_power)));
      }
    }
    const SingleRunSummary summary = run_single(config);
    table.rows[i] = RateRow{config.m, config.n_steps, summary.error, {}};
  });
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double prev = table.rows[i - 1].error;
    const double cur = table.rows[i].error;
    table.rows[i].order = std::log(prev / cur) / std::log(double(ratio));
  }

  // flag degenerate sweeps: errors already at the solver floor, or no
  // longer shrinking under refinement
  const auto tail = table.tail_order();
  if (table.rows.back().error < 1e3 * base.solver_tol ||
      (tail && *tail < 0.25)) {
    table.floor_suspected = true;
  }
  return table;
}

std::string format_sci(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5e", value);
  return buf;
}

void write_csv(const RateTable& table, std::ostream& out) {
  out << "mesh,error,order\n";
  for (const auto& row : table.rows) {
    const std::size_t mesh =
        table.axis == SweepAxis::temporal ? row.n_steps : row.m;
    out << mesh << ',' << format_sci(row.error) << ',';
    if (row.order) out << format_sci(*row.order);
    out << '\n';
  }
}

void write_csv(const SingleRunSummary& summary, std::ostream& out) {
  out << "problem,scheme,alpha,degree,m,n_steps,dofs,tau,metric,error,"
         "final_error,max_error\n";
  const auto& c = summary.config;
  out << c.problem << ',' << to_string(c.scheme) << ',' << format_alpha(c.alpha)
      << ',' << c.degree << ',' << c.m << ',' << c.n_steps << ','
      << summary.dofs << ',' << format_sci(summary.tau) << ','
      << to_string(c.metric) << ',' << format_sci(summary.error) << ','
      << format_sci(summary.final_error) << ','
      << format_sci(summary.max_error) << '\n';
}

GronwallVerifyResult gronwall_verify(const GronwallVerifyConfig& config) {
  if (config.alphas.empty()) throw usage_error("gronwall: need at least one alpha");
  if (config.n_steps < 1) throw usage_error("gronwall: need n-steps >= 1");
  if (!(config.lambda1 >= 0.0) || !(config.lambda2 >= 0.0)) {
    throw usage_error("gronwall: lambda factors must be nonnegative");
  }
  const std::size_t N = config.n_steps;
  GronwallVerifyResult result;
  auto record = [&result](double alpha, std::size_t n, const char* check,
                          bool pass) {
    ++result.checks_run;
    if (!pass) result.failures.push_back({alpha, n, check, false});
  };

  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    const double alpha = config.alphas[ai];
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw usage_error("gronwall: alpha must lie in (0,1)");
    }
    std::vector<double> p = p_sequence(alpha, N).p;
    if (config.corrupt_p) p[N / 2] += 0.01;
    const std::vector<double> a = l1_weights(alpha, N + 1);
    const double g2a = std::tgamma(2.0 - alpha);

    // identity (i): sum_{j=k}^{n} p_{n-j} a_{j-k} = 1
    for (std::size_t n = 1; n <= N; ++n) {
      const std::size_t ks[3] = {1, (n + 1) / 2, n};
      for (std::size_t k : ks) {
        if (k < 1 || k > n) continue;
        double s = 0;
        for (std::size_t j = k; j <= n; ++j) s += p[n - j] * a[j - k];
        record(alpha, n, "identity-i", std::abs(s - 1.0) <= 1e-10);
      }
    }

    // inequality (ii): Gamma(2-a) sum_{j<=n} p_{n-j} <= n^a / Gamma(1+a)
    for (std::size_t n = 1; n <= N; ++n) {
      double psum = 0;
      for (std::size_t j = 1; j <= n; ++j) psum += p[n - j];
      const double rhs = std::pow(double(n), alpha) / std::tgamma(1.0 + alpha);
      record(alpha, n, "identity-ii", g2a * psum <= rhs * (1.0 + 1e-12));
    }

    // inequality (iii) for powers m = 1..6
    for (int mm = 1; mm <= 6; ++mm) {
      const double expo = (mm - 1) * alpha;
      const double front = g2a / std::tgamma(1.0 + expo);
      for (std::size_t n = 2; n <= N; ++n) {
        double s = 0;
        for (std::size_t j = 1; j <= n - 1; ++j) {
          s += p[n - j] * std::pow(double(j), expo);
        }
        const double rhs =
            std::pow(double(n), mm * alpha) / std::tgamma(1.0 + mm * alpha);
        record(alpha, n, "identity-iii", front * s <= rhs * (1.0 + 1e-12));
      }
    }

    // randomized coercivity trials
    const double tau = config.horizon / double(N);
    const L1Kernel kernel(alpha, tau, N);
    std::mt19937_64 rng(config.seed + ai);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < config.trials; ++trial) {
      std::vector<std::vector<double>> history(N + 1, std::vector<double>(3));
      for (auto& v : history) {
        for (double& x : v) x = dist(rng);
      }
      const std::vector<bool> ok = coercivity_check(history, kernel);
      bool pass = true;
      std::size_t first_bad = 0;
      for (std::size_t n = 1; n <= N; ++n) {
        if (!ok[n - 1]) {
          pass = false;
          first_bad = n;
          break;
        }
      }
      record(alpha, first_bad, "coercivity", pass);
    }

    // equality-generated Gronwall premise checked against the bound
    GronwallPremise premise;
    premise.alpha = alpha;
    premise.tau = tau;
    premise.lambda1 = config.lambda1;
    premise.lambda2 = config.lambda2;
    premise.omega.assign(N + 1, 0.0);
    premise.omega[0] = 1.0;
    premise.g.assign(N, 0.5);
    const double c_tau = kernel.scale();
    if (c_tau <= premise.lambda1) {
      throw usage_error(
          "gronwall: lambda1 too large for this step size (c_tau <= lambda1)");
    }
    for (std::size_t n = 1; n <= N; ++n) {
      double hist = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double b = j == 0 ? -a[n - 1] : a[n - j] - a[n - j - 1];
        hist += b * premise.omega[j];
      }
      premise.omega[n] = (-c_tau * hist + premise.lambda2 * premise.omega[n - 1] +
                          premise.g[n - 1]) /
                         (c_tau - premise.lambda1);
    }
    const auto reports = gronwall_check(premise);
    for (const auto& r : reports) {
      record(alpha, r.n, "gronwall", r.premise_ok && r.bound_ok);
    }
  }
  return result;
}

void write_report(const GronwallVerifyResult& result, std::ostream& out) {
  out << "gronwall verification: " << result.checks_run << " checks, "
      << result.failures.size() << " failures\n";
  for (const auto& f : result.failures) {
    out << "FAIL alpha=" << format_alpha(f.alpha) << " n=" << f.n << ' '
        << f.check << '\n';
  }
  if (result.all_pass()) out << "all checks passed\n";
}

std::string ReferenceTable::key(int table, const std::string& block,
                                std::size_t m, std::size_t n_steps) {
  std::ostringstream os;
  os << table << '|' << block << '|' << m << '|' << n_steps;
  return os.str();
}

const ReferenceTable::Cell* ReferenceTable::find(int table,
                                                 const std::string& block,
                                                 std::size_t m,
                                                 std::size_t n_steps) const {
  const auto it = cells.find(key(table, block, m, n_steps));
  return it == cells.end() ? nullptr : &it->second;
}

ReferenceTable load_reference_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open reference table file: " + path);
  ReferenceTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.rfind("table,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(stripped);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() < 5) {
      throw usage_error("bad reference table line: " + stripped);
    }
    const int id = static_cast<int>(parse_size("table", fields[0]));
    const std::size_t m = parse_size("m", fields[2]);
    const std::size_t n = parse_size("n_steps", fields[3]);
    ReferenceTable::Cell cell;
    cell.error = parse_double("error", fields[4]);
    if (fields.size() >= 6 && !fields[5].empty()) {
      cell.order = parse_double("order", fields[5]);
    }
    table.cells[ReferenceTable::key(id, fields[1], m, n)] = cell;
  }
  return table;
}

TableResult reproduce_table(int table, Scale scale, int jobs,
                            const std::string& reference_path) {
  TableResult result;
  result.table = table;
  result.scale = scale;
  std::optional<ReferenceTable> refs;
  if (!reference_path.empty()) refs = load_reference_table(reference_path);

  struct Block {
    std::string label;
    ExperimentConfig config;
    SweepAxis axis;
    std::vector<std::size_t> levels;
    double time_power = 0.0;
  };
  std::vector<Block> blocks;

  const std::vector<std::size_t> temporal1 = {10, 20, 40, 80};
  const std::vector<std::size_t> temporal5 = {50, 100, 200, 400, 800};
  if (table == 1) {
    for (const char* scheme : {"s1", "s2", "s3"}) {
      for (double alpha : {0.25, 0.5, 0.75}) {
        ExperimentConfig c;
        c.problem = "huxley2d";
        c.scheme = scheme_from_string(scheme);
        c.alpha = alpha;
        c.degree = 2;
        c.m = 100;
        c.metric = ErrorMetric::final;
        blocks.push_back({std::string(scheme) + "/alpha=" + format_alpha(alpha),
                          c, SweepAxis::temporal, temporal1});
      }
    }
  } else if (table == 2) {
    std::vector<std::size_t> ms = {5, 10, 20};
    if (scale == Scale::full) ms.push_back(40);
    for (int degree : {1, 2}) {
      ExperimentConfig c;
      c.problem = "huxley2d";
      c.scheme = SchemeId::s1;
      c.alpha = 0.25;
      c.degree = degree;
      c.metric = ErrorMetric::final;
      blocks.push_back({degree == 1 ? "p1" : "p2", c, SweepAxis::spatial, ms,
                        3.0});
    }
  } else if (table == 5) {
    for (const char* scheme : {"s1", "s2", "s3"}) {
      for (double alpha : {0.4, 0.6, 0.8}) {
        ExperimentConfig c;
        c.problem = "fokker-planck1d";
        c.scheme = scheme_from_string(scheme);
        c.alpha = alpha;
        c.degree = 1;
        c.m = 10000;
        c.metric = ErrorMetric::max;
        blocks.push_back({std::string(scheme) + "/alpha=" + format_alpha(alpha),
                          c, SweepAxis::temporal, temporal5});
      }
    }
  } else {
    throw usage_error("table id must be 1, 2, or 5");
  }

  for (const auto& block : blocks) {
    const RateTable rates =
        convergence_sweep(block.config, block.axis, block.levels,
                          block.time_power, jobs);
    for (const auto& row : rates.rows) {
      TableRow out;
      out.block = block.label;
      out.m = row.m;
      out.n_steps = row.n_steps;
      out.error = row.error;
      out.order = row.order;
      if (refs) {
        if (const auto* cell = refs->find(table, block.label, row.m, row.n_steps);
            cell != nullptr) {
          out.ref_error = cell->error;
          out.ref_order = cell->order;
        }
      }
      result.rows.push_back(std::move(out));
    }
  }
  return result;
}

void write_csv(const TableResult& result, std::ostream& out) {
  out << "block,m,n_steps,error,order,ref_error,ref_order,rel_dev\n";
  for (const auto& row : result.rows) {
    out << row.block << ',' << row.m << ',' << row.n_steps << ','
        << format_sci(row.error) << ',';
    if (row.order) out << format_sci(*row.order);
    out << ',';
    if (row.ref_error) out << format_sci(*row.ref_error);
    out << ',';
    if (row.ref_order) out << format_sci(*row.ref_order);
    out << ',';
    if (row.ref_error) {
      out << format_sci(std::abs(row.error - *row.ref_error) / *row.ref_error);
    }
    out << '\n';
  }
}

}  // namespace fracfem
