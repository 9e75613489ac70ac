#include "prefd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace prefd {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate fit: all abscissae coincide");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Records of one spec that can enter a log-log fit.
std::vector<const RunRecord*> fit_candidates(std::span<const RunRecord> records) {
  std::vector<const RunRecord*> out;
  for (const RunRecord& r : records) {
    if (r.err.e_inf > 0.0 && r.n > 0) out.push_back(&r);
  }
  return out;
}

void append_fits(ConvergenceReport& report) {
  std::vector<std::string> order;  // spec names, first appearance
  std::map<std::string, std::vector<RunRecord>> by_spec;
  for (const RunRecord& r : report.records) {
    auto [it, inserted] = by_spec.try_emplace(r.order_spec);
    if (inserted) order.push_back(r.order_spec);
    it->second.push_back(r);
  }
  for (const std::string& name : order) {
    const auto& group = by_spec[name];
    if (fit_candidates(group).size() < 2) {
      report.failures.push_back("fit skipped for order spec '" + name +
                                "': fewer than two records with positive error");
      continue;
    }
    report.fits.emplace_back(name, fit_rate(group, report.fit_min_n));
  }
}

}  // namespace

ErrorNorms error_norms(const Eigen::VectorXd& u_h, const Eigen::VectorXd& u_exact) {
  if (u_h.size() != u_exact.size()) throw std::invalid_argument("error_norms: length mismatch");
  if (u_h.size() == 0) throw std::invalid_argument("error_norms: empty fields");
  const double ref_inf = u_exact.lpNorm<Eigen::Infinity>();
  const double ref_2 = u_exact.norm();
  const double ref_1 = u_exact.lpNorm<1>();
  if (ref_inf == 0.0) throw std::invalid_argument("error_norms: zero exact-solution norm");
  const Eigen::VectorXd diff = u_h - u_exact;
  ErrorNorms e;
  e.e_inf = diff.lpNorm<Eigen::Infinity>() / ref_inf;
  e.e_2 = diff.norm() / ref_2;
  e.e_1 = diff.lpNorm<1>() / ref_1;
  return e;
}

double estimate_rate(std::span<const double> n_values, std::span<const double> errors) {
  if (n_values.size() != errors.size()) throw std::invalid_argument("estimate_rate: length mismatch");
  if (n_values.size() < 2) throw std::invalid_argument("estimate_rate: need at least two points");
  std::vector<double> x, y;
  x.reserve(n_values.size());
  y.reserve(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (!(n_values[i] > 0.0)) throw std::invalid_argument("estimate_rate: N must be positive");
    if (!(errors[i] > 0.0)) throw std::invalid_argument("estimate_rate: errors must be positive");
    x.push_back(std::log10(n_values[i]));
    y.push_back(std::log10(errors[i]));
  }
  return least_squares(x, y).slope;
}

RateFit fit_rate(std::span<const RunRecord> records, double min_n) {
  auto usable = fit_candidates(records);
  if (usable.size() < 2) {
    throw std::invalid_argument("fit_rate: need at least two records with positive error");
  }
  std::vector<const RunRecord*> subset;
  for (const RunRecord* r : usable) {
    if (static_cast<double>(r->n) >= min_n) subset.push_back(r);
  }
  if (subset.size() < 2) subset = usable;  // ladder too short for the cutoff

  std::vector<double> x, xh, y;
  RateFit fit;
  for (const RunRecord* r : subset) {
    if (!(r->h > 0.0)) throw std::invalid_argument("fit_rate: records need positive h");
    x.push_back(std::log10(static_cast<double>(r->n)));
    xh.push_back(-std::log10(r->h));
    y.push_back(std::log10(r->err.e_inf));
    fit.subset_n.push_back(r->n);
  }
  std::sort(fit.subset_n.begin(), fit.subset_n.end());
  const LineFit line = least_squares(x, y);
  fit.slope = line.slope;
  fit.slope_h = least_squares(xh, y).slope;
  fit.intercept = line.intercept;
  fit.rms_residual = line.rms_residual;
  return fit;
}

ConvergenceReport run_convergence(const SweepConfig& config) {
  if (config.order_specs.empty()) {
    throw std::invalid_argument("run_convergence: no order specs");
  }
  if (config.n_ladder.empty() && config.h_ladder.empty()) {
    throw std::invalid_argument("run_convergence: empty ladder");
  }
  if (config.repeats < 1) throw std::invalid_argument("run_convergence: repeats must be >= 1");

  const std::size_t steps =
      config.n_ladder.empty() ? config.h_ladder.size() : config.n_ladder.size();
  const std::string case_name = config.problem.name.empty() ? "case" : config.problem.name;

  // One seed for the whole sweep: specs at the same ladder point see the
  // same node set, so error comparisons across specs are paired.
  struct Cell {
    SolveConfig solve;
    const RadialZoneSpec* spec = nullptr;
    std::string ladder_label;
  };
  std::vector<Cell> cells;
  for (std::size_t step = 0; step < steps; ++step) {
    Cell cell;
    cell.solve = config.solve;
    std::ostringstream label;
    if (config.n_ladder.empty()) {
      cell.solve.h = config.h_ladder[step];
      cell.solve.target_n = 0;
      label << "h=" << config.h_ladder[step];
    } else {
      cell.solve.h = 0.0;
      cell.solve.target_n = config.n_ladder[step];
      label << "N=" << config.n_ladder[step];
    }
    cell.ladder_label = label.str();
    for (const RadialZoneSpec& spec : config.order_specs) {
      cell.spec = &spec;
      cells.push_back(cell);
    }
  }

  struct Outcome {
    RunRecord record;
    bool ok = false;
    std::string failure;
  };
  std::vector<Outcome> outcomes(cells.size());

  auto run_cell = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    Outcome& out = outcomes[idx];
    try {
      SolveResult first = solve_problem(config.problem, *cell.spec, cell.solve);
      PhaseTimes best = first.seconds;
      for (int r = 1; r < config.repeats; ++r) {
        const PhaseTimes again = solve_problem(config.problem, *cell.spec, cell.solve).seconds;
        best.nodes = std::min(best.nodes, again.nodes);
        best.weights = std::min(best.weights, again.weights);
        best.assemble = std::min(best.assemble, again.assemble);
        best.solve = std::min(best.solve, again.solve);
        best.total = std::min(best.total, again.total);
      }

      RunRecord rec;
      rec.case_name = case_name;
      rec.n = first.nodes.size();
      rec.n_interior = first.nodes.interior_count();
      rec.n_boundary = first.nodes.boundary_count();
      rec.h = first.nodes.h;
      rec.order_spec = cell.spec->name;
      rec.seed = cell.solve.seed;
      if (config.problem.exact) {
        Eigen::VectorXd exact(first.nodes.size());
        for (Eigen::Index i = 0; i < first.nodes.size(); ++i) {
          exact[i] = config.problem.exact(first.nodes.position(i));
        }
        rec.err = error_norms(first.solution.values, exact);
      }
      rec.nnz = first.nnz;
      rec.seconds = best;
      rec.stats = first.solution.stats;
      out.record = std::move(rec);
      out.ok = true;
    } catch (const std::exception& e) {
      out.failure = "cell failed (case " + case_name + ", spec " + cell.spec->name + ", " +
                    cell.ladder_label + "): " + e.what();
    }
  };

  if (!config.parallel_cells || cells.size() < 2) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    const std::size_t workers =
        std::min(cells.size(),
                 static_cast<std::size_t>(std::max(2u, std::thread::hardware_concurrency())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) run_cell(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ConvergenceReport report;
  report.fit_min_n = config.fit_min_n;
  for (Outcome& out : outcomes) {
    if (out.ok) {
      report.records.push_back(std::move(out.record));
    } else {
      report.failures.push_back(std::move(out.failure));
      report.complete = false;
    }
  }
  append_fits(report);
  return report;
}

ConvergenceReport refit(std::vector<RunRecord> records, double fit_min_n) {
  ConvergenceReport report;
  report.records = std::move(records);
  report.fit_min_n = fit_min_n;
  append_fits(report);
  return report;
}

void write_records_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << kRecordsCsvHeader << "\n";
  for (const RunRecord& r : records) {
    if (r.case_name.find(',') != std::string::npos ||
        r.order_spec.find(',') != std::string::npos) {
      throw std::invalid_argument("write_records_csv: names must not contain commas");
    }
    out << r.case_name << ',' << r.n << ',' << r.n_interior << ',' << r.n_boundary << ','
        << fmt(r.h) << ',' << r.order_spec << ',' << r.seed << ',' << fmt(r.err.e_inf) << ','
        << fmt(r.err.e_2) << ',' << fmt(r.err.e_1) << ',' << r.nnz << ','
        << fmt(r.seconds.nodes) << ',' << fmt(r.seconds.weights) << ','
        << fmt(r.seconds.assemble) << ',' << fmt(r.seconds.solve) << ','
        << fmt(r.seconds.total) << "\n";
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsCsvHeader) {
    throw std::runtime_error("records csv: unexpected header '" + line + "'");
  }

  std::vector<RunRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 16) {
      throw std::runtime_error("records csv: line " + std::to_string(lineno) +
                               " has " + std::to_string(fields.size()) + " fields, want 16");
    }
    try {
      RunRecord r;
      r.case_name = fields[0];
      r.n = std::stoll(fields[1]);
      r.n_interior = std::stoll(fields[2]);
      r.n_boundary = std::stoll(fields[3]);
      r.h = std::stod(fields[4]);
      r.order_spec = fields[5];
      r.seed = std::stoull(fields[6]);
      r.err.e_inf = std::stod(fields[7]);
      r.err.e_2 = std::stod(fields[8]);
      r.err.e_1 = std::stod(fields[9]);
      r.nnz = std::stoll(fields[10]);
      r.seconds.nodes = std::stod(fields[11]);
      r.seconds.weights = std::stod(fields[12]);
      r.seconds.assemble = std::stod(fields[13]);
      r.seconds.solve = std::stod(fields[14]);
      r.seconds.total = std::stod(fields[15]);
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("records csv: line " + std::to_string(lineno) +
                               " has a malformed number");
    }
  }
  return records;
}

void write_report(std::ostream& out, const ConvergenceReport& report) {
  char buf[160];
  out << "convergence report: " << report.records.size() << " records, " << report.fits.size()
      << " rate fits\n";
  out << "status: " << (report.complete ? "complete" : "INCOMPLETE") << "\n";
  std::snprintf(buf, sizeof buf, "fit subset: N >= %g\n", report.fit_min_n);
  out << buf;

  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> by_spec;
  for (const RunRecord& r : report.records) {
    auto [it, inserted] = by_spec.try_emplace(r.order_spec);
    if (inserted) order.push_back(r.order_spec);
    it->second.push_back(&r);
  }

  for (const std::string& name : order) {
    out << "\norder spec " << name << "\n";
    out << "        N       Nd          h        e_inf          e_2          e_1      t_total\n";
    for (const RunRecord* r : by_spec[name]) {
      std::snprintf(buf, sizeof buf, " %8lld %8lld %10.4g %12.5g %12.5g %12.5g %12.5g\n", r->n,
                    r->n_boundary, r->h, r->err.e_inf, r->err.e_2, r->err.e_1, r->seconds.total);
      out << buf;
    }
    for (const auto& [spec, fit] : report.fits) {
      if (spec != name) continue;
      std::snprintf(buf, sizeof buf,
                    "rate: %.4g per decade of N, %.4g per decade of 1/h "
                    "(rms residual %.2g), subset N =",
                    fit.slope, fit.slope_h, fit.rms_residual);
      out << buf;
      for (long long n : fit.subset_n) out << ' ' << n;
      out << "\n";
    }
  }

  if (!report.failures.empty()) {
    out << "\nnotes:\n";
    for (const std::string& f : report.failures) out << "  - " << f << "\n";
  }
}

void write_figure_data(const std::filesystem::path& dir, const ConvergenceReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> by_spec;
  for (const RunRecord& r : report.records) {
    auto [it, inserted] = by_spec.try_emplace(r.order_spec);
    if (inserted) order.push_back(r.order_spec);
    it->second.push_back(&r);
  }
  for (auto& [name, group] : by_spec) {
    std::sort(group.begin(), group.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->n < b->n; });
  }

  auto is_uniform = [](const std::string& name) { return name.rfind("uniform", 0) == 0; };

  // One series per order spec: convergence figures use columns 1:2,
  // the timing figure 1:3.
  std::vector<std::string> conv_specs, ref_specs;
  for (const std::string& name : order) {
    std::ofstream out(dir / ("series_" + name + ".csv"));
    if (!out) throw std::runtime_error("write_figure_data: cannot open series file for " + name);
    out << "N,e_inf,t_total\n";
    for (const RunRecord* r : by_spec[name]) {
      out << r->n << ',' << fmt(r->err.e_inf) << ',' << fmt(r->seconds.total) << "\n";
    }
    (is_uniform(name) ? conv_specs : ref_specs).push_back(name);
  }

  std::ofstream gp(dir / "plots.gp");
  if (!gp) throw std::runtime_error("write_figure_data: cannot open plots.gp");
  gp << "# gnuplot script; run from this directory\n"
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'N'\n"
        "set key bottom left\n"
        "set term pngcairo size 800,600\n";

  auto emit_plot = [&gp](const std::string& png, const std::string& ylabel,
                         std::span<const std::string> specs, int column) {
    if (specs.empty()) return;
    gp << "\nset ylabel '" << ylabel << "'\nset output '" << png << "'\nplot";
    for (std::size_t i = 0; i < specs.size(); ++i) {
      gp << (i == 0 ? " " : ", ") << "'series_" << specs[i] << ".csv' skip 1 using 1:" << column
         << " with linespoints title '" << specs[i] << "'";
    }
    gp << "\n";
  };

  // Uniform-order convergence, refined convergence (uniform curves kept for
  // reference), and total times for everything.
  std::vector<std::string> ref_plot = ref_specs;
  for (const std::string& name : conv_specs) ref_plot.push_back(name);
  emit_plot("fig_convergence.png", "relative error (inf norm)", conv_specs, 2);
  emit_plot("fig_refinement.png", "relative error (inf norm)", ref_plot, 2);
  emit_plot("fig_times.png", "total time [s]", order, 3);
}

}  // namespace prefd
