#include "prefd/pde.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

namespace prefd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_residual(const SparseSystem& sys, const Eigen::VectorXd& x) {
  const double rhs_norm = sys.rhs.norm();
  if (rhs_norm == 0.0) return (sys.matrix * x).norm();
  return (sys.matrix * x - sys.rhs).norm() / rhs_norm;
}

}  // namespace

PoissonProblem strong_source_problem() {
  return strong_source_problem(std::make_shared<BallDomain>(Vector::Zero(2), 1.5));
}

PoissonProblem strong_source_problem(std::shared_ptr<const Domain> domain) {
  if (!domain) throw std::invalid_argument("strong_source_problem: null domain");
  const int d = domain->dimension();
  const double a = 400.0;  // bump sharpness of 1 / (a r^2 + 1)
  const Vector source = Vector::Constant(d, 0.5);

  auto u = [a, source](const Vector& x) {
    return 1.0 / (a * (x - source).squaredNorm() + 1.0);
  };
  auto lap_u = [a, d, source](const Vector& x) {
    const double r2 = (x - source).squaredNorm();
    const double f = 1.0 / (a * r2 + 1.0);
    return 8.0 * a * a * r2 * f * f * f - 2.0 * a * d * f * f;
  };

  PoissonProblem problem;
  problem.domain = std::move(domain);
  problem.rhs = lap_u;
  problem.dirichlet = u;
  problem.exact = u;
  problem.name = "strong-source";
  return problem;
}

SparseSystem assemble_global(const NodeSet& nodes, std::span<const StencilWeights> weights,
                             const PoissonProblem& problem) {
  const Eigen::Index n = nodes.size();
  if (!problem.rhs || !problem.dirichlet) {
    throw std::invalid_argument("assemble_global: problem must define rhs and dirichlet data");
  }

  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t expected = static_cast<std::size_t>(nodes.boundary_count());
  for (const StencilWeights& sw : weights) expected += sw.neighbors.size();
  triplets.reserve(expected);

  SparseSystem sys;
  sys.rhs.resize(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (nodes.is_boundary(i)) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      sys.rhs[i] = problem.dirichlet(nodes.position(i));
      covered[static_cast<std::size_t>(i)] = true;
    } else {
      sys.rhs[i] = problem.rhs(nodes.position(i));
    }
  }

  for (const StencilWeights& sw : weights) {
    if (sw.center < 0 || sw.center >= n || nodes.is_boundary(sw.center)) {
      throw std::invalid_argument("assemble_global: weight center is not an interior node");
    }
    if (covered[static_cast<std::size_t>(sw.center)]) {
      throw std::invalid_argument("assemble_global: duplicate weights for a node");
    }
    if (static_cast<Eigen::Index>(sw.neighbors.size()) != sw.w.size()) {
      throw std::invalid_argument("assemble_global: weight/neighbor length mismatch");
    }
    for (std::size_t j = 0; j < sw.neighbors.size(); ++j) {
      triplets.emplace_back(sw.center, sw.neighbors[j], sw.w[static_cast<Eigen::Index>(j)]);
    }
    covered[static_cast<std::size_t>(sw.center)] = true;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!covered[static_cast<std::size_t>(i)]) {
      std::ostringstream msg;
      msg << "assemble_global: missing weights for interior node " << i;
      throw std::invalid_argument(msg.str());
    }
  }

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.structural_nonzeros = static_cast<long long>(triplets.size());
  return sys;
}

SolutionField solve_sparse(const SparseSystem& sys, double tol, SolverKind kind) {
  const Eigen::Index n = sys.matrix.rows();
  if (n != sys.matrix.cols() || n != sys.rhs.size()) {
    throw std::invalid_argument("solve_sparse: system shape mismatch");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("solve_sparse: tolerance must be positive");
  if (kind == SolverKind::Auto) {
    kind = n <= 200000 ? SolverKind::Direct : SolverKind::Iterative;
  }

  SolutionField out;
  if (kind == SolverKind::Direct) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) {
      throw SolveError("solve_sparse: sparse LU factorization failed (singular system?)");
    }
    out.values = lu.solve(sys.rhs);
    out.stats.method = "sparse-lu";
    out.stats.iterations = 0;
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(tol * 0.1);
    solver.setMaxIterations(2000);
    solver.compute(sys.matrix);
    if (solver.info() != Eigen::Success) {
      throw SolveError("solve_sparse: ILU preconditioner setup failed");
    }
    out.values = solver.solve(sys.rhs);
    out.stats.method = "bicgstab-ilut";
    out.stats.iterations = static_cast<int>(solver.iterations());
  }

  out.stats.residual = relative_residual(sys, out.values);
  if (!out.values.allFinite() || !(out.stats.residual <= tol)) {
    std::ostringstream msg;
    msg << "solve_sparse: residual contract violated (method " << out.stats.method
        << ", achieved " << out.stats.residual << ", tolerance " << tol << ")";
    throw SolveError(msg.str());
  }
  return out;
}

SolveResult solve_problem(const PoissonProblem& problem, const RadialZoneSpec& spec,
                          const SolveConfig& config) {
  if (!problem.domain) throw std::invalid_argument("solve_problem: problem has no domain");

  const auto t_start = Clock::now();
  SolveResult result;

  auto phase = [](const char* name, auto&& body) {
    const auto t0 = Clock::now();
    try {
      body();
    } catch (const std::exception& e) {
      throw SolveError(std::string("phase ") + name + ": " + e.what());
    }
    return seconds_since(t0);
  };

  double h = config.h;
  if (!(h > 0.0)) {
    const auto* ball = dynamic_cast<const BallDomain*>(problem.domain.get());
    if (ball == nullptr) {
      throw std::invalid_argument("solve_problem: target_n mapping requires a ball domain; set h");
    }
    if (config.target_n <= 0) throw std::invalid_argument("solve_problem: set h or target_n");
    h = spacing_for_target(*ball, config.target_n, config.spacing_calibration);
  }

  result.seconds.nodes = phase("nodes", [&] {
    const auto boundary = problem.domain->discretize_boundary(h, config.seed);
    result.nodes = fill_interior(*problem.domain, boundary, h, config.seed, config.fill_candidates);
  });

  std::vector<StencilWeights> weights;
  result.seconds.weights = phase("weights", [&] {
    result.orders = assign_orders(result.nodes, spec);
    const StencilTable stencils = select_stencils(result.nodes, result.orders.n);
    weights = compute_all_weights(result.nodes, stencils, result.orders,
                                  PhsBasis{config.phs_exponent}, OperatorTag::Laplacian,
                                  config.threads);
  });

  SparseSystem sys;
  result.seconds.assemble = phase("assemble", [&] {
    sys = assemble_global(result.nodes, weights, problem);
    result.nnz = sys.structural_nonzeros;
  });

  result.seconds.solve = phase("solve", [&] {
    result.solution = solve_sparse(sys, config.tol, config.solver);
  });

  result.seconds.total = seconds_since(t_start);
  return result;
}

void write_solution(std::ostream& out, const NodeSet& nodes, const Eigen::VectorXd& values,
                    const ScalarField& exact) {
  if (values.size() != nodes.size()) {
    throw std::invalid_argument("write_solution: one value per node required");
  }
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  out << "# d=" << nodes.dimension() << " h=";
  put(nodes.h);
  out << " N=" << nodes.size() << "\n";
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    for (int a = 0; a < nodes.dimension(); ++a) {
      put(nodes.positions(i, a));
      out << ' ';
    }
    put(values[i]);
    const double u = exact ? exact(nodes.position(i)) : std::nan("");
    out << ' ';
    put(u);
    out << ' ';
    put(std::abs(values[i] - u));
    out << "\n";
  }
}

void write_triplets(std::ostream& out, const SparseSystem& sys) {
  char buf[64];
  out << "# rows=" << sys.matrix.rows() << " cols=" << sys.matrix.cols()
      << " nnz=" << sys.matrix.nonZeros() << "\n";
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() << ' ' << it.col() << ' ' << buf << "\n";
    }
  }
}

}  // namespace prefd
