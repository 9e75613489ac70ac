// Python bindings for the solver core. The heavy lifting stays in C++; the
// module exposes node generation, stencil weights, and the end-to-end solve
// with optional python callables for the PDE data.

#include "prefd/config.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace prefd;

namespace {

std::shared_ptr<BallDomain> make_domain(const std::optional<Vector>& center, double radius,
                                        int dim) {
  Vector c = center.value_or(Vector::Zero(dim));
  return std::make_shared<BallDomain>(std::move(c), radius);
}

RadialZoneSpec spec_from(const std::string& name, int dim) { return preset(name, dim); }

NodeSet generate_nodes(Eigen::Index n, double h, std::uint64_t seed, double radius,
                       const std::optional<Vector>& center, int dim) {
  const auto domain = make_domain(center, radius, dim);
  double spacing = h;
  if (!(spacing > 0.0)) {
    if (n <= 0) throw std::invalid_argument("generate_nodes: pass n or h");
    spacing = spacing_for_target(*domain, n);
  }
  return fill_interior(*domain, domain->discretize_boundary(spacing, seed), spacing, seed);
}

Eigen::VectorXd laplacian_weights(const Eigen::MatrixXd& points, const Vector& center, int order,
                                  int k) {
  const MonomialBasis mono(order, static_cast<int>(center.size()));
  return solve_local(
      assemble_local(points, center, PhsBasis{k}, mono, OperatorTag::Laplacian));
}

struct SolveSummary {
  Eigen::MatrixXd positions;
  Eigen::VectorXd values;
  std::vector<int> orders;
  double h = 0.0;
  long long n = 0;
  long long n_boundary = 0;
  long long nnz = 0;
  double e_inf = std::numeric_limits<double>::quiet_NaN();
  double e_2 = std::numeric_limits<double>::quiet_NaN();
  double e_1 = std::numeric_limits<double>::quiet_NaN();
  PhaseTimes seconds;
  SolverStats stats;
};

SolveSummary summarize(const PoissonProblem& problem, const SolveResult& result) {
  SolveSummary out;
  out.positions = result.nodes.positions;
  out.values = result.solution.values;
  out.orders = result.orders.m;
  out.h = result.nodes.h;
  out.n = result.nodes.size();
  out.n_boundary = result.nodes.boundary_count();
  out.nnz = result.nnz;
  out.seconds = result.seconds;
  out.stats = result.solution.stats;
  if (problem.exact) {
    Eigen::VectorXd exact(result.nodes.size());
    for (Eigen::Index i = 0; i < result.nodes.size(); ++i) {
      exact[i] = problem.exact(result.nodes.position(i));
    }
    const ErrorNorms err = error_norms(result.solution.values, exact);
    out.e_inf = err.e_inf;
    out.e_2 = err.e_2;
    out.e_1 = err.e_1;
  }
  return out;
}

SolveConfig make_config(Eigen::Index n, double h, std::uint64_t seed, int threads, double tol) {
  SolveConfig config;
  config.h = h;
  config.target_n = (h > 0.0) ? 0 : (n > 0 ? n : 3000);
  config.seed = seed;
  config.threads = threads;
  config.tol = tol;
  return config;
}

SolveSummary solve_strong_source(const std::string& spec, Eigen::Index n, double h,
                                 std::uint64_t seed, int threads, double tol) {
  const PoissonProblem problem = strong_source_problem();
  const SolveResult result =
      solve_problem(problem, preset(spec, 2), make_config(n, h, seed, threads, tol));
  return summarize(problem, result);
}

SolveSummary solve_poisson(const ScalarField& rhs, const ScalarField& dirichlet,
                           const ScalarField& exact, const std::string& spec, double radius,
                           const std::optional<Vector>& center, int dim, Eigen::Index n,
                           double h, std::uint64_t seed, int threads, double tol) {
  PoissonProblem problem;
  problem.domain = make_domain(center, radius, dim);
  problem.rhs = rhs;
  problem.dirichlet = dirichlet;
  problem.exact = exact;
  problem.name = "custom";
  const SolveResult result =
      solve_problem(problem, preset(spec, dim), make_config(n, h, seed, threads, tol));
  return summarize(problem, result);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-refined meshfree poisson solver";
#ifdef PREFD_VERSION
  m.attr("__version__") = PREFD_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::class_<BallDomain>(m, "BallDomain")
      .def(py::init<Vector, double>(), py::arg("center"), py::arg("radius"))
      .def_property_readonly("center", &BallDomain::center)
      .def_property_readonly("radius", &BallDomain::radius)
      .def_property_readonly("dimension", &BallDomain::dimension)
      .def("signed_distance", &BallDomain::signed_distance, py::arg("point"));

  py::class_<NodeSet>(m, "NodeSet")
      .def_readonly("positions", &NodeSet::positions)
      .def_readonly("h", &NodeSet::h)
      .def_property_readonly("n", &NodeSet::size)
      .def_property_readonly("n_boundary", &NodeSet::boundary_count)
      .def_property_readonly("n_interior", &NodeSet::interior_count)
      .def("is_boundary", &NodeSet::is_boundary, py::arg("i"));

  py::class_<RadialZoneSpec>(m, "OrderLayout")
      .def_readonly("name", &RadialZoneSpec::name)
      .def_readonly("default_order", &RadialZoneSpec::default_order)
      .def_property_readonly("zones",
                             [](const RadialZoneSpec& spec) {
                               std::vector<std::pair<double, int>> out;
                               for (const RadialZone& z : spec.zones) {
                                 out.emplace_back(z.radius, z.order);
                               }
                               return out;
                             })
      .def("__repr__", [](const RadialZoneSpec& spec) {
        return "<OrderLayout '" + spec.name + "'>";
      });

  py::class_<SolveSummary>(m, "SolveSummary")
      .def_readonly("positions", &SolveSummary::positions)
      .def_readonly("values", &SolveSummary::values)
      .def_readonly("orders", &SolveSummary::orders)
      .def_readonly("h", &SolveSummary::h)
      .def_readonly("n", &SolveSummary::n)
      .def_readonly("n_boundary", &SolveSummary::n_boundary)
      .def_readonly("nnz", &SolveSummary::nnz)
      .def_readonly("e_inf", &SolveSummary::e_inf)
      .def_readonly("e_2", &SolveSummary::e_2)
      .def_readonly("e_1", &SolveSummary::e_1)
      .def_property_readonly("times",
                             [](const SolveSummary& s) {
                               py::dict t;
                               t["nodes"] = s.seconds.nodes;
                               t["weights"] = s.seconds.weights;
                               t["assemble"] = s.seconds.assemble;
                               t["solve"] = s.seconds.solve;
                               t["total"] = s.seconds.total;
                               return t;
                             })
      .def_readonly("stats", &SolveSummary::stats);

  py::class_<SolverStats>(m, "SolverStats")
      .def_readonly("method", &SolverStats::method)
      .def_readonly("iterations", &SolverStats::iterations)
      .def_readonly("residual", &SolverStats::residual);

  m.def("preset", &spec_from, py::arg("name"), py::arg("dim") = 2,
        "named order layout: uniform-2/4/6 or the graded presets c1, c2, c3");

  m.def("generate_nodes", &generate_nodes, py::arg("n") = 0, py::arg("h") = 0.0,
        py::arg("seed") = 1, py::arg("radius") = 1.5, py::arg("center") = std::nullopt,
        py::arg("dim") = 2,
        "quasi-uniform node set on a ball; boundary nodes first");

  m.def("laplacian_weights", &laplacian_weights, py::arg("points"), py::arg("center"),
        py::arg("order"), py::arg("k") = 3,
        "stencil weights approximating the laplacian at `center` from values "
        "at `points` (rows), using spline exponent k and monomials up to `order`");

  m.def("solve_strong_source", &solve_strong_source, py::arg("spec") = "c2",
        py::arg("n") = 3000, py::arg("h") = 0.0, py::arg("seed") = 1, py::arg("threads") = 1,
        py::arg("tol") = 1e-10,
        "solve the built-in sharp-bump dirichlet problem on the ball of radius 1.5");

  m.def("solve_poisson", &solve_poisson, py::arg("rhs"), py::arg("dirichlet"),
        py::arg("exact") = nullptr, py::arg("spec") = "c2", py::arg("radius") = 1.5,
        py::arg("center") = std::nullopt, py::arg("dim") = 2, py::arg("n") = 0,
        py::arg("h") = 0.0, py::arg("seed") = 1, py::arg("threads") = 1, py::arg("tol") = 1e-10,
        "solve lap u = rhs with dirichlet data on a ball; error norms are "
        "filled when `exact` is given");
}
