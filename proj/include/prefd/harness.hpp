#pragma once

#include "prefd/pde.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace prefd {

struct ErrorNorms {
  double e_inf = 0.0;
  double e_2 = 0.0;
  double e_1 = 0.0;
};

/// Relative discrete norms |u_h - u|_p / |u|_p over all nodes.
ErrorNorms error_norms(const Eigen::VectorXd& u_h, const Eigen::VectorXd& u_exact);

/// One solved configuration: sizes, errors, timings.
struct RunRecord {
  std::string case_name;
  long long n = 0;
  long long n_interior = 0;
  long long n_boundary = 0;
  double h = 0.0;
  std::string order_spec;
  std::uint64_t seed = 0;
  ErrorNorms err;
  long long nnz = 0;
  PhaseTimes seconds;
  SolverStats stats;  // not part of the CSV
};

/// Least-squares slope of log10(error) against log10(N).
double estimate_rate(std::span<const double> n_values, std::span<const double> errors);

struct RateFit {
  double slope = 0.0;    // log10 e_inf against log10 N
  double slope_h = 0.0;  // log10 e_inf against log10 (1/h); both negative when converging
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::vector<long long> subset_n;  // N values that entered the fit
};

/// Fit over the records of one order spec, restricted to N >= min_n (all
/// positive-error records when fewer than two remain).
RateFit fit_rate(std::span<const RunRecord> records, double min_n);

struct SweepConfig {
  PoissonProblem problem;
  std::vector<Eigen::Index> n_ladder;  // target node counts
  std::vector<double> h_ladder;        // used when n_ladder is empty
  std::vector<RadialZoneSpec> order_specs;
  SolveConfig solve;
  int repeats = 5;       // timings keep the best run
  double fit_min_n = 4000.0;
  // Run the sweep cells concurrently. Errors and records stay identical to a
  // sequential sweep; timings become meaningless under contention.
  bool parallel_cells = false;
};

struct ConvergenceReport {
  std::vector<RunRecord> records;
  std::vector<std::pair<std::string, RateFit>> fits;  // per order spec
  std::vector<std::string> failures;
  double fit_min_n = 4000.0;
  bool complete = true;
};

/// Runs every (ladder point, order spec) cell. Errors come from the first
/// run; each timing phase keeps its minimum over `repeats` runs. Failed
/// cells are recorded and skipped.
ConvergenceReport run_convergence(const SweepConfig& config);

/// Slope refit of existing records (the `report` path).
ConvergenceReport refit(std::vector<RunRecord> records, double fit_min_n);

inline constexpr char kRecordsCsvHeader[] =
    "case,N,Ni,Nd,h,order_spec,seed,e_inf,e_2,e_1,nnz,t_nodes,t_weights,t_assemble,t_solve,t_total";

void write_records_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_records_csv(std::istream& in);

void write_report(std::ostream& out, const ConvergenceReport& report);

/// Emits per-figure data series under `dir`: error-vs-N for uniform and
/// refined order specs, total-time-vs-N for all specs, plus a gnuplot
/// script that renders them.
void write_figure_data(const std::filesystem::path& dir, const ConvergenceReport& report);

}  // namespace prefd
