#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracfem/stepper.hpp"

namespace fracfem {

/// Raised for malformed configuration (unknown problem, bad flag values);
/// the CLI maps it to exit code 2.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ErrorMetric { final, max };

ErrorMetric metric_from_string(std::string_view name);
const char* to_string(ErrorMetric metric);

struct ExperimentConfig {
  std::string problem = "huxley2d";
  SchemeId scheme = SchemeId::s1;
  double alpha = 0.5;
  int degree = 1;
  std::size_t m = 8;        // mesh subdivisions per axis
  std::size_t n_steps = 8;  // time steps
  ErrorMetric metric = ErrorMetric::final;
  double solver_tol = 1e-12;
  std::string out;  // CSV destination; empty means stdout only

  void validate() const;  // throws usage_error
};

/// Parses "key = value" lines ('#' comments, blank lines allowed) into an
/// ExperimentConfig; unknown keys throw usage_error.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

struct SingleRunSummary {
  ExperimentConfig config;
  std::size_t dofs = 0;
  double tau = 0;
  double error = 0;        // selected metric
  double final_error = 0;
  double max_error = 0;
  std::size_t total_iterations = 0;  // linear solver, summed over steps
};

SingleRunSummary run_single(const ExperimentConfig& config);

/// Which discretization parameter a sweep refines. Temporal sweeps double
/// n_steps at fixed m; spatial sweeps double m and slave n_steps to a
/// power of m so the temporal error stays subordinate.
enum class SweepAxis { temporal, spatial };

struct RateRow {
  std::size_t m = 0;
  std::size_t n_steps = 0;
  double error = 0;
  std::optional<double> order;  // empty on the first row
};

struct RateTable {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::temporal;
  std::vector<RateRow> rows;
  bool floor_suspected = false;  // set when refinement stops paying off

  /// Observed order from the last pair of rows.
  std::optional<double> tail_order() const;
};

/// Runs the configuration at each refinement level and fills in observed
/// orders log2(e_{k-1}/e_k). `levels` holds the temporal step counts
/// (axis == temporal) or the mesh subdivisions (axis == spatial); for a
/// spatial sweep n_steps is recomputed per level as round(m^time_power).
RateTable convergence_sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const std::size_t> levels,
                            double time_power = 0.0, int jobs = 1);

void write_csv(const RateTable& table, std::ostream& out);
void write_csv(const SingleRunSummary& summary, std::ostream& out);

struct GronwallVerifyConfig {
  std::vector<double> alphas = {0.25, 0.5, 0.75};
  std::size_t n_steps = 512;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  int trials = 200;        // randomized coercivity histories per alpha
  double horizon = 1.0;    // T; tau = T / n_steps
  std::uint64_t seed = 12345;
  bool corrupt_p = false;  // fault injection: perturb one p-weight
};

/// One failed or passed check at a given (alpha, step) pair. Check names:
/// "identity-i", "identity-ii", "identity-iii", "coercivity", "gronwall".
struct GronwallCheck {
  double alpha = 0;
  std::size_t n = 0;
  std::string check;
  bool pass = false;
};

struct GronwallVerifyResult {
  std::vector<GronwallCheck> failures;  // empty when everything passed
  std::size_t checks_run = 0;
  bool all_pass() const { return failures.empty(); }
};

/// Runs, per alpha: the complementary p-sequence identities (equality (i)
/// and inequalities (ii)-(iii) for m <= 6), randomized coercivity trials,
/// and an equality-generated Gronwall premise checked against the
/// Mittag-Leffler bound. corrupt_p perturbs one p-weight so identity (i)
/// must fail (fault-injection self-test).
GronwallVerifyResult gronwall_verify(const GronwallVerifyConfig& config);

void write_report(const GronwallVerifyResult& result, std::ostream& out);

enum class Scale { desk, full };

Scale scale_from_string(std::string_view name);

/// One row of a reproduced convergence table next to its reference.
struct TableRow {
  std::string block;  // e.g. "s1/alpha=0.25"
  std::size_t m = 0;
  std::size_t n_steps = 0;
  double error = 0;
  std::optional<double> order;
  std::optional<double> ref_error;
  std::optional<double> ref_order;
};

struct TableResult {
  int table = 0;
  Scale scale = Scale::desk;
  std::vector<TableRow> rows;
};

/// Reference values shipped in data/reference_tables.csv. Keyed by
/// (table, block, n_steps) for temporal tables and (table, block, m) for
/// the spatial one.
struct ReferenceTable {
  struct Cell {
    double error = 0;
    std::optional<double> order;
  };
  std::map<std::string, Cell> cells;

  static std::string key(int table, const std::string& block, std::size_t m,
                         std::size_t n_steps);
  const Cell* find(int table, const std::string& block, std::size_t m,
                   std::size_t n_steps) const;
};

ReferenceTable load_reference_table(const std::string& path);

/// Re-runs the experiments behind one of the published tables (1, 2, or 5)
/// and attaches reference cells when a data file is given. `jobs` bounds
/// the number of concurrent single runs.
TableResult reproduce_table(int table, Scale scale, int jobs = 1,
                            const std::string& reference_path = {});

void write_csv(const TableResult& result, std::ostream& out);

/// Shared formatting for all CSV output: 6 significant digits, scientific.
std::string format_sci(double value);

}  // namespace fracfem
