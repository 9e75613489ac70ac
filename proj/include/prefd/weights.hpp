#pragma once

#include "prefd/basis.hpp"
#include "prefd/geometry.hpp"
#include "prefd/refinement.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prefd {

/// Augmented local collocation system [[A, P], [P^T, 0]] with right hand
/// side (l_phi, l_p). Assembled in a shifted and scaled frame around the
/// stencil center; the operator scaling is folded into the right hand side
/// so that the solved weights act on unscaled field values.
struct LocalSystem {
  Eigen::MatrixXd matrix;  // (n + s) x (n + s), symmetric
  Eigen::VectorXd rhs;
  int n = 0;  // stencil size
  int s = 0;  // monomial count
};

LocalSystem assemble_local(const Eigen::MatrixXd& stencil_points, const Vector& center,
                           const PhsBasis& phs, const MonomialBasis& mono, OperatorTag op);

class SingularLocalSystem : public std::runtime_error {
 public:
  explicit SingularLocalSystem(const std::string& what) : std::runtime_error(what) {}
};

/// Weights = first n entries of the saddle solution (row-pivoted dense LU);
/// the trailing s Lagrange multipliers are discarded. Throws
/// SingularLocalSystem when the smallest pivot falls below 1e-14 of the
/// matrix magnitude.
Eigen::VectorXd solve_local(const LocalSystem& sys);

/// Operator weights of one node over its stencil.
struct StencilWeights {
  int center = -1;
  std::vector<int> neighbors;
  Eigen::VectorXd w;
};

/// Aggregated weight-computation failure; lists every offending node.
class WeightFailure : public std::runtime_error {
 public:
  WeightFailure(const std::string& what, std::vector<int> nodes)
      : std::runtime_error(what), nodes_(std::move(nodes)) {}
  const std::vector<int>& nodes() const { return nodes_; }

 private:
  std::vector<int> nodes_;
};

/// Weights for every interior node, in increasing node order. Each node is
/// computed independently from its own stencil and order, so the result does
/// not depend on the number of threads.
std::vector<StencilWeights> compute_all_weights(const NodeSet& nodes, const StencilTable& stencils,
                                                const OrderField& orders, const PhsBasis& phs,
                                                OperatorTag op, int threads = 1);

/// Debug dump: one line per node, `center n j_1 .. j_n w_1 .. w_n`.
void write_weights(std::ostream& out, std::span<const StencilWeights> weights);

}  // namespace prefd
