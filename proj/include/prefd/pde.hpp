#pragma once

#include "prefd/geometry.hpp"
#include "prefd/refinement.hpp"
#include "prefd/weights.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>

namespace prefd {

using ScalarField = std::function<double(const Vector&)>;

/// Poisson problem with Dirichlet data: Lap u = rhs in the domain,
/// u = dirichlet on the boundary. `exact` is optional and only used for
/// error evaluation.
struct PoissonProblem {
  std::shared_ptr<const Domain> domain;
  ScalarField rhs;
  ScalarField dirichlet;
  ScalarField exact;  // may be empty
  std::string name = "poisson";
};

/// Dirichlet problem on the unit-and-a-half disk whose solution
/// u(x) = 1 / (400 |x - c|^2 + 1), c = (1/2, 1/2), is a sharp bump: a
/// strong localized source for the Laplacian. The right hand side is the
/// closed-form Laplacian of u, so u doubles as the exact solution.
PoissonProblem strong_source_problem();
PoissonProblem strong_source_problem(std::shared_ptr<const Domain> domain);

class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Global N x N sparse operator and right hand side. One row per node:
/// stencil weights for interior rows, a unit diagonal for boundary rows.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  long long structural_nonzeros = 0;  // sum of stencil sizes + boundary rows
};

SparseSystem assemble_global(const NodeSet& nodes, std::span<const StencilWeights> weights,
                             const PoissonProblem& problem);

enum class SolverKind { Auto, Direct, Iterative };

struct SolverStats {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  // achieved |Ax - b|_2 / |b|_2
};

struct SolutionField {
  Eigen::VectorXd values;
  SolverStats stats;
};

/// Solves the assembled system to a relative residual <= tol. Auto picks a
/// sparse direct factorization up to 2e5 unknowns and ILU-preconditioned
/// BiCGSTAB beyond. Throws SolveError when the residual contract cannot be
/// met; the achieved residual is reported either way.
SolutionField solve_sparse(const SparseSystem& sys, double tol = 1e-10,
                           SolverKind kind = SolverKind::Auto);

struct SolveConfig {
  double h = 0.0;               // target spacing; used when > 0
  Eigen::Index target_n = 0;    // otherwise: approximate node count
  int phs_exponent = 3;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int threads = 1;
  SolverKind solver = SolverKind::Auto;
  int fill_candidates = 15;
  double spacing_calibration = kSpacingCalibration;
};

struct PhaseTimes {
  double nodes = 0.0;
  double weights = 0.0;
  double assemble = 0.0;
  double solve = 0.0;
  double total = 0.0;
};

struct SolveResult {
  NodeSet nodes;
  OrderField orders;
  SolutionField solution;
  long long nnz = 0;
  PhaseTimes seconds;
};

/// Full pipeline: discretize, assign orders, select stencils, compute
/// weights, assemble, solve. Wall-clock time is recorded per phase and
/// failures carry the phase name.
SolveResult solve_problem(const PoissonProblem& problem, const RadialZoneSpec& spec,
                          const SolveConfig& config);

/// Text dump `x .. u_h u_exact abs_err` per node (nan when no exact
/// solution is attached), with a `# d= h= N=` header.
void write_solution(std::ostream& out, const NodeSet& nodes, const Eigen::VectorXd& values,
                    const ScalarField& exact);

/// Coordinate-format dump `row col value`, one entry per line.
void write_triplets(std::ostream& out, const SparseSystem& sys);

}  // namespace prefd
