#include "prefd/weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

namespace prefd {

LocalSystem assemble_local(const Eigen::MatrixXd& stencil_points, const Vector& center,
                           const PhsBasis& phs, const MonomialBasis& mono, OperatorTag op) {
  const int n = static_cast<int>(stencil_points.rows());
  const int d = static_cast<int>(stencil_points.cols());
  if (n < 1) throw std::invalid_argument("assemble_local: empty stencil");
  if (center.size() != d || mono.dim() != d) {
    throw std::invalid_argument("assemble_local: dimension mismatch");
  }
  const int s = mono.size();
  if (n < s) throw std::invalid_argument("assemble_local: stencil smaller than monomial count");

  // The PHS block works on plain distances (PHS has no shape parameter, so
  // nothing is gained by scaling it). The monomial block is evaluated in a
  // shifted frame scaled by the farthest stencil distance -- the local proxy
  // for h -- which keeps P entries O(1) for any spacing; its operator values
  // carry the inverse scaling so the weights act on unscaled fields.
  Eigen::MatrixXd local = stencil_points.rowwise() - center.transpose();
  double scale = std::sqrt(local.rowwise().squaredNorm().maxCoeff());
  if (!(scale > 0.0)) scale = 1.0;

  LocalSystem sys;
  sys.n = n;
  sys.s = s;
  sys.matrix.setZero(n + s, n + s);
  sys.rhs.setZero(n + s);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double r = (local.row(i) - local.row(j)).norm();
      if (r == 0.0) throw std::invalid_argument("assemble_local: duplicate stencil points");
      const double v = phs_eval(phs, r);
      sys.matrix(i, j) = v;
      sys.matrix(j, i) = v;
    }
    sys.matrix(i, i) = phs_eval(phs, 0.0);
  }

  Vector xi(d);
  for (int i = 0; i < n; ++i) {
    xi = local.row(i).transpose() / scale;
    for (int l = 0; l < s; ++l) {
      const double v = monomial_eval(mono.exponent(l), xi);
      sys.matrix(i, n + l) = v;
      sys.matrix(n + l, i) = v;
    }
  }

  const Vector origin = Vector::Zero(d);
  for (int i = 0; i < n; ++i) {
    const double r = local.row(i).norm();
    sys.rhs[i] = op == OperatorTag::Identity ? phs_eval(phs, r) : phs_laplacian(phs, d, r);
  }
  const double op_scale = op == OperatorTag::Laplacian ? 1.0 / (scale * scale) : 1.0;
  for (int l = 0; l < s; ++l) {
    sys.rhs[n + l] = op_scale * monomial_apply(op, mono.exponent(l), origin);
  }
  return sys;
}

Eigen::VectorXd solve_local(const LocalSystem& sys) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
  const double magnitude = sys.matrix.cwiseAbs().maxCoeff();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > 1e-14 * magnitude)) {
    std::ostringstream msg;
    msg << "solve_local: singular saddle system (pivot " << min_pivot << ", magnitude "
        << magnitude << ")";
    throw SingularLocalSystem(msg.str());
  }
  Eigen::VectorXd solution = lu.solve(sys.rhs);
  if (!solution.allFinite()) throw SingularLocalSystem("solve_local: non-finite solution");
  return solution.head(sys.n);
}

std::vector<StencilWeights> compute_all_weights(const NodeSet& nodes, const StencilTable& stencils,
                                                const OrderField& orders, const PhsBasis& phs,
                                                OperatorTag op, int threads) {
  const Eigen::Index n_total = nodes.size();
  const int d = nodes.dimension();
  if (stencils.size() != n_total || orders.size() != n_total) {
    throw std::invalid_argument("compute_all_weights: table sizes must match the node count");
  }
  if (threads < 1) throw std::invalid_argument("compute_all_weights: threads must be >= 1");

  std::vector<int> interior;
  interior.reserve(static_cast<std::size_t>(n_total));
  std::map<int, MonomialBasis> bases;
  for (Eigen::Index i = 0; i < n_total; ++i) {
    if (nodes.is_boundary(i)) continue;
    const int m = orders.m[static_cast<std::size_t>(i)];
    const int expected = stencil_size_for_order(m, d);
    if (orders.n[static_cast<std::size_t>(i)] != expected ||
        static_cast<int>(stencils.stencil(i).size()) != expected) {
      throw std::invalid_argument("compute_all_weights: stencil sizes inconsistent with orders");
    }
    bases.try_emplace(m, m, d);
    interior.push_back(static_cast<int>(i));
  }

  std::vector<StencilWeights> result(interior.size());
  using Failure = std::pair<int, std::string>;

  auto worker = [&](std::size_t begin, std::size_t end, std::vector<Failure>& failures) {
    Eigen::MatrixXd pts;
    for (std::size_t slot = begin; slot < end; ++slot) {
      const int i = interior[slot];
      const auto& stencil = stencils.stencil(i);
      pts.resize(static_cast<Eigen::Index>(stencil.size()), d);
      for (std::size_t j = 0; j < stencil.size(); ++j) {
        pts.row(static_cast<Eigen::Index>(j)) = nodes.positions.row(stencil[j]);
      }
      try {
        const LocalSystem sys = assemble_local(pts, nodes.position(i), phs,
                                               bases.at(orders.m[static_cast<std::size_t>(i)]), op);
        result[slot] = StencilWeights{i, stencil, solve_local(sys)};
      } catch (const std::exception& e) {
        failures.emplace_back(i, e.what());
      }
    }
  };

  std::vector<std::vector<Failure>> failures(static_cast<std::size_t>(threads));
  if (threads == 1 || interior.size() < 2 * static_cast<std::size_t>(threads)) {
    worker(0, interior.size(), failures[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (interior.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(interior.size(), t * chunk);
      const std::size_t end = std::min(interior.size(), begin + chunk);
      pool.emplace_back(worker, begin, end, std::ref(failures[static_cast<std::size_t>(t)]));
    }
    for (auto& th : pool) th.join();
  }

  std::vector<Failure> all;
  for (auto& list : failures) all.insert(all.end(), list.begin(), list.end());
  if (!all.empty()) {
    std::sort(all.begin(), all.end());
    std::vector<int> ids;
    ids.reserve(all.size());
    for (const auto& [id, what] : all) ids.push_back(id);
    std::ostringstream msg;
    msg << "compute_all_weights: " << all.size() << " node(s) failed; first: node "
        << all.front().first << ": " << all.front().second << "; nodes [";
    const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg << (i ? " " : "") << ids[i];
    if (shown < ids.size()) msg << " ... " << ids.size() - shown << " more";
    msg << "]";
    throw WeightFailure(msg.str(), std::move(ids));
  }
  return result;
}

void write_weights(std::ostream& out, std::span<const StencilWeights> weights) {
  char buf[64];
  for (const StencilWeights& sw : weights) {
    out << sw.center << ' ' << sw.neighbors.size();
    for (const int j : sw.neighbors) out << ' ' << j;
    for (Eigen::Index j = 0; j < sw.w.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", sw.w[j]);
      out << ' ' << buf;
    }
    out << "\n";
  }
}

}  // namespace prefd
