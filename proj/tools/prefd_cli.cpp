// Command line driver.
//
//   prefd nodes     generate a node set and dump it as text
//   prefd solve     one full run; writes a solution dump and a record CSV
//   prefd converge  ladder sweep; writes the records CSV and prints a report
//   prefd report    re-fit convergence rates from an existing records CSV
//
// All subcommands read the same ini config (see configs/); command line
// flags override individual values.

#include "prefd/config.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

using namespace prefd;

namespace {

struct CommonArgs {
  std::string config_path;
  double h = 0.0;        // overrides, 0 / empty = keep the config value
  long long n = 0;
  long long seed = -1;
  int threads = 0;
  std::string spec_name;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "ini configuration file");
  cmd->add_option("--spacing", args.h, "target spacing (overrides [discretization] h)");
  cmd->add_option("-n,--nodes", args.n, "target node count (overrides [discretization] n)");
  cmd->add_option("--seed", args.seed, "placement seed (overrides [discretization] seed)");
  cmd->add_option("--threads", args.threads, "weight-computation threads");
  cmd->add_option("--spec", args.spec_name,
                  "order layout preset: uniform-2/4/6, c1, c2, c3 "
                  "(single runs; restricts a sweep to this one spec)");
}

HarnessSetup resolve(const CommonArgs& args) {
  HarnessSetup setup = args.config_path.empty()
                           ? default_setup()
                           : load_setup(Config::parse_file(args.config_path));
  if (args.h > 0.0) {
    setup.single_h = args.h;
    setup.single_n = 0;
  }
  if (args.n > 0) {
    setup.single_n = args.n;
    setup.single_h = 0.0;
  }
  if (args.seed >= 0) setup.sweep.solve.seed = static_cast<std::uint64_t>(args.seed);
  if (args.threads > 0) setup.sweep.solve.threads = args.threads;
  if (!args.spec_name.empty()) {
    setup.order_spec = preset(args.spec_name, setup.domain->dimension());
    setup.sweep.order_specs = {setup.order_spec};
  }
  return setup;
}

SolveConfig single_config(const HarnessSetup& setup) {
  SolveConfig config = setup.sweep.solve;
  config.h = setup.single_h;
  config.target_n = setup.single_n;
  if (!(config.h > 0.0) && config.target_n <= 0) config.target_n = 3000;
  return config;
}

// `-` selects stdout.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  body(out);
}

void write_report_files(const std::string& dir, const ConvergenceReport& report) {
  write_figure_data(dir, report);
  std::ofstream out(std::filesystem::path(dir) / "report.txt");
  if (!out) throw std::runtime_error("cannot write report.txt under " + dir);
  write_report(out, report);
}

int cmd_nodes(const CommonArgs& args, const std::string& output) {
  const HarnessSetup setup = resolve(args);
  const SolveConfig config = single_config(setup);
  const double h = config.h > 0.0
                       ? config.h
                       : spacing_for_target(*setup.domain, config.target_n,
                                            config.spacing_calibration);
  const NodeSet nodes = fill_interior(
      *setup.domain, setup.domain->discretize_boundary(h, config.seed), h, config.seed,
      config.fill_candidates);
  const OrderField orders = assign_orders(nodes, setup.order_spec);
  with_output(output, [&](std::ostream& out) { write_nodes(out, nodes, orders.m); });
  if (output != "-") {
    std::cout << "wrote " << nodes.size() << " nodes (" << nodes.boundary_count()
              << " boundary, h=" << nodes.h << ", spec " << setup.order_spec.name << ") to "
              << output << "\n";
  }
  return 0;
}

int cmd_solve(const CommonArgs& args, const std::string& solution_path,
              const std::string& record_path, const std::string& matrix_path) {
  const HarnessSetup setup = resolve(args);
  const SolveConfig config = single_config(setup);
  const SolveResult result = solve_problem(setup.problem, setup.order_spec, config);

  RunRecord rec;
  rec.case_name = setup.problem.name;
  rec.n = result.nodes.size();
  rec.n_interior = result.nodes.interior_count();
  rec.n_boundary = result.nodes.boundary_count();
  rec.h = result.nodes.h;
  rec.order_spec = setup.order_spec.name;
  rec.seed = config.seed;
  if (setup.problem.exact) {
    Eigen::VectorXd exact(result.nodes.size());
    for (Eigen::Index i = 0; i < result.nodes.size(); ++i) {
      exact[i] = setup.problem.exact(result.nodes.position(i));
    }
    rec.err = error_norms(result.solution.values, exact);
  }
  rec.nnz = result.nnz;
  rec.seconds = result.seconds;
  rec.stats = result.solution.stats;

  if (!solution_path.empty()) {
    with_output(solution_path, [&](std::ostream& out) {
      write_solution(out, result.nodes, result.solution.values, setup.problem.exact);
    });
  }
  if (!record_path.empty()) {
    with_output(record_path, [&](std::ostream& out) {
      write_records_csv(out, std::vector<RunRecord>{rec});
    });
  }
  if (!matrix_path.empty()) {
    // the pipeline does not keep the assembled system around; rebuild it from
    // the returned discretization (deterministic, so it is the same system)
    const StencilTable stencils = select_stencils(result.nodes, result.orders.n);
    const auto weights =
        compute_all_weights(result.nodes, stencils, result.orders,
                            PhsBasis{config.phs_exponent}, OperatorTag::Laplacian,
                            config.threads);
    const SparseSystem sys = assemble_global(result.nodes, weights, setup.problem);
    with_output(matrix_path, [&](std::ostream& out) { write_triplets(out, sys); });
  }

  char line[256];
  std::snprintf(line, sizeof line,
                "case=%s spec=%s N=%lld h=%.4g e_inf=%.5g e_2=%.5g solver=%s t_total=%.3gs\n",
                rec.case_name.c_str(), rec.order_spec.c_str(), rec.n, rec.h, rec.err.e_inf,
                rec.err.e_2, rec.stats.method.c_str(), rec.seconds.total);
  std::cout << line;
  return 0;
}

int cmd_converge(const CommonArgs& args, const std::string& records_path,
                 const std::string& out_dir, bool parallel_cells) {
  HarnessSetup setup = resolve(args);
  setup.sweep.parallel_cells = parallel_cells;
  const ConvergenceReport report = run_convergence(setup.sweep);

  with_output(records_path, [&](std::ostream& out) { write_records_csv(out, report.records); });
  if (records_path != "-") write_report(std::cout, report);
  if (!out_dir.empty()) write_report_files(out_dir, report);
  return report.complete ? 0 : 2;
}

int cmd_report(const std::string& records_path, double fit_min_n, const std::string& out_dir) {
  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open records file " + records_path);
  const ConvergenceReport report = refit(read_records_csv(in), fit_min_n);
  write_report(std::cout, report);
  if (!out_dir.empty()) write_report_files(out_dir, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-refined meshfree poisson solver"};
  app.require_subcommand(1);

  CommonArgs nodes_args;
  std::string nodes_output = "-";
  CLI::App* nodes = app.add_subcommand("nodes", "generate and dump a node set");
  add_common(nodes, nodes_args);
  nodes->add_option("-o,--output", nodes_output, "node dump destination (default stdout)");

  CommonArgs solve_args;
  std::string solution_path = "solution.txt";
  std::string record_path = "record.csv";
  std::string matrix_path;
  CLI::App* solve = app.add_subcommand("solve", "run one solve and dump the solution");
  add_common(solve, solve_args);
  solve->add_option("--solution", solution_path, "solution dump file ('-' = stdout, '' = skip)");
  solve->add_option("--record", record_path, "single-record CSV file ('' = skip)");
  solve->add_option("--matrix", matrix_path, "also dump the system in triplet form");

  CommonArgs converge_args;
  std::string records_path = "records.csv";
  std::string converge_out;
  bool parallel_cells = false;
  CLI::App* converge = app.add_subcommand("converge", "run the full convergence sweep");
  add_common(converge, converge_args);
  converge->add_option("--records", records_path, "records CSV destination");
  converge->add_option("-o,--out", converge_out, "directory for report.txt and figure data");
  converge->add_flag("--parallel-cells", parallel_cells,
                     "run sweep cells concurrently (invalidates timings)");

  std::string report_records;
  double fit_min_n = 4000.0;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "re-fit rates from an existing records CSV");
  report->add_option("--records", report_records, "records CSV to read")->required();
  report->add_option("--fit-min-n", fit_min_n, "smallest N admitted to the rate fits");
  report->add_option("-o,--out", report_out, "directory for report.txt and figure data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (nodes->parsed()) return cmd_nodes(nodes_args, nodes_output);
    if (solve->parsed()) return cmd_solve(solve_args, solution_path, record_path, matrix_path);
    if (converge->parsed()) {
      return cmd_converge(converge_args, records_path, converge_out, parallel_cells);
    }
    if (report->parsed()) return cmd_report(report_records, fit_min_n, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
