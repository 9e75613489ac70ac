#include "prefd/geometry.hpp"

#include "prefd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace prefd {

namespace {

constexpr int kLeafSize = 16;

/// Uniform hash grid with cell size h. Supports "is any stored point closer
/// than r" queries for r <= h by scanning the 3^d surrounding cells. Cells
/// are identified by hash only; collisions merge buckets, which can only add
/// candidates to a scan, never hide one.
class NeighborGrid {
 public:
  NeighborGrid(double cell, int dim) : cell_(cell), dim_(dim) {}

  void insert(const Vector& p, int index) {
    buckets_[key_of(p)].push_back(index);
  }

  bool has_neighbor_within(const Vector& p, double dist2,
                           const Eigen::MatrixXd& points) const {
    std::vector<std::int64_t> cell(dim_);
    for (int i = 0; i < dim_; ++i) cell[i] = coord(p[i]);
    std::vector<std::int64_t> probe(dim_);
    return scan_neighbors(0, cell, probe, p, dist2, points);
  }

 private:
  bool scan_neighbors(int axis, const std::vector<std::int64_t>& cell,
                      std::vector<std::int64_t>& probe, const Vector& p, double dist2,
                      const Eigen::MatrixXd& points) const {
    if (axis == dim_) {
      const auto it = buckets_.find(hash_cell(probe));
      if (it == buckets_.end()) return false;
      for (const int j : it->second) {
        if ((points.row(j).transpose() - p).squaredNorm() < dist2) return true;
      }
      return false;
    }
    for (std::int64_t off = -1; off <= 1; ++off) {
      probe[axis] = cell[axis] + off;
      if (scan_neighbors(axis + 1, cell, probe, p, dist2, points)) return true;
    }
    return false;
  }

  std::int64_t coord(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }

  std::uint64_t key_of(const Vector& p) const {
    std::vector<std::int64_t> cell(dim_);
    for (int i = 0; i < dim_; ++i) cell[i] = coord(p[i]);
    return hash_cell(cell);
  }

  static std::uint64_t hash_cell(const std::vector<std::int64_t>& cell) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (const std::int64_t c : cell) {
      std::uint64_t x = static_cast<std::uint64_t>(c);
      x *= 0xBF58476D1CE4E5B9ULL;
      x ^= x >> 27;
      h = (h ^ x) * 0x94D049BB133111EBULL;
    }
    return h;
  }

  double cell_;
  int dim_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

}  // namespace

BallDomain::BallDomain(Vector center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1) throw std::invalid_argument("BallDomain: center must have dimension >= 1");
  if (!center_.allFinite()) throw std::invalid_argument("BallDomain: center must be finite");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("BallDomain: radius must be positive and finite");
  }
}

double BallDomain::signed_distance(const Vector& p) const {
  if (p.size() != center_.size()) throw std::invalid_argument("signed_distance: dimension mismatch");
  return (p - center_).norm() - radius_;
}

std::vector<Vector> BallDomain::discretize_boundary(double h, std::uint64_t seed) const {
  if (!(h > 0.0)) throw std::invalid_argument("discretize_boundary: h must be positive");
  if (!(h < diameter())) throw std::invalid_argument("discretize_boundary: h exceeds the domain diameter");

  std::vector<Vector> points;
  const int d = dimension();
  if (d == 1) {
    Vector lo(1), hi(1);
    lo[0] = center_[0] - radius_;
    hi[0] = center_[0] + radius_;
    points.push_back(lo);
    points.push_back(hi);
    return points;
  }
  if (d != 2) {
    throw std::invalid_argument("discretize_boundary: ball boundary sampling supports d <= 2");
  }

  const double circumference = 2.0 * std::numbers::pi * radius_;
  const long long count = std::llround(circumference / h);
  if (count < 4) {
    throw std::invalid_argument("discretize_boundary: h too coarse to place at least 4 boundary nodes");
  }

  std::mt19937_64 gen(seed);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(count);
  const double phase = rng::uniform01(gen) * step;
  points.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const double angle = phase + step * static_cast<double>(i);
    Vector p(2);
    p[0] = center_[0] + radius_ * std::cos(angle);
    p[1] = center_[1] + radius_ * std::sin(angle);
    points.push_back(std::move(p));
  }
  return points;
}

Eigen::Index NodeSet::boundary_count() const {
  return static_cast<Eigen::Index>(
      std::count(kind.begin(), kind.end(), NodeKind::Boundary));
}

NodeSet fill_interior(const Domain& domain, const std::vector<Vector>& boundary, double h,
                      std::uint64_t seed, int candidates) {
  if (boundary.empty()) throw std::invalid_argument("fill_interior: boundary must be nonempty");
  if (!(h > 0.0)) throw std::invalid_argument("fill_interior: h must be positive");
  if (candidates < 1) throw std::invalid_argument("fill_interior: candidates must be >= 1");
  const int d = domain.dimension();
  for (const Vector& b : boundary) {
    if (b.size() != d) throw std::invalid_argument("fill_interior: boundary dimension mismatch");
  }

  const double min_sep = h * (1.0 - 1e-10);
  const double min_sep2 = min_sep * min_sep;

  // Grow a flat position buffer; the queue is just a cursor into it.
  Eigen::MatrixXd points(boundary.size(), d);
  for (std::size_t i = 0; i < boundary.size(); ++i) points.row(static_cast<Eigen::Index>(i)) = boundary[i];

  NeighborGrid grid(h, d);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    grid.insert(points.row(i).transpose(), static_cast<int>(i));
  }

  std::mt19937_64 gen(seed);
  Eigen::Index count = points.rows();
  Vector candidate(d);
  for (Eigen::Index head = 0; head < count; ++head) {
    const Vector base = points.row(head).transpose();
    for (int c = 0; c < candidates; ++c) {
      candidate = base + h * rng::unit_vector(gen, d);
      if (!(domain.signed_distance(candidate) < 0.0)) continue;
      if (grid.has_neighbor_within(candidate, min_sep2, points)) continue;
      if (count == points.rows()) {
        points.conservativeResize(points.rows() * 2, Eigen::NoChange);
      }
      points.row(count) = candidate;
      grid.insert(candidate, static_cast<int>(count));
      ++count;
    }
  }

  NodeSet nodes;
  nodes.positions = points.topRows(count);
  nodes.kind.assign(static_cast<std::size_t>(count), NodeKind::Interior);
  std::fill(nodes.kind.begin(), nodes.kind.begin() + static_cast<std::ptrdiff_t>(boundary.size()),
            NodeKind::Boundary);
  nodes.h = h;
  return nodes;
}

double spacing_for_target(const BallDomain& domain, Eigen::Index target_n, double calibration) {
  if (target_n < 8) throw std::invalid_argument("spacing_for_target: target node count too small");
  if (!(calibration > 0.0)) throw std::invalid_argument("spacing_for_target: calibration must be positive");
  return domain.radius() * std::sqrt(std::numbers::pi / static_cast<double>(target_n)) * calibration;
}

SpatialIndex::SpatialIndex(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("SpatialIndex: empty point set");
  order_.resize(static_cast<std::size_t>(points_.rows()));
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(order_.size() / kLeafSize * 2 + 1);
  build(0, static_cast<int>(order_.size()));
}

int SpatialIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  // Split along the widest axis of the range's bounding box.
  const int dim = dimension();
  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < dim; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int t = begin; t < end; ++t) {
      const double v = points_(order_[static_cast<std::size_t>(t)], a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = points_(a, axis), cb = points_(b, axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = points_(order_[static_cast<std::size_t>(mid)], axis);

  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <typename Heap>
void SpatialIndex::search(int node, const Vector& query, int k, Heap& best) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.axis < 0) {
    for (int t = nd.begin; t < nd.end; ++t) {
      const int idx = order_[static_cast<std::size_t>(t)];
      const Entry e{(points_.row(idx).transpose() - query).squaredNorm(), idx};
      if (static_cast<int>(best.size()) < k) {
        best.push(e);
      } else if (e < best.top()) {
        best.pop();
        best.push(e);
      }
    }
    return;
  }
  const double delta = query[nd.axis] - nd.split;
  const int near = delta < 0.0 ? nd.left : nd.right;
  const int far = delta < 0.0 ? nd.right : nd.left;
  search(near, query, k, best);
  // <= keeps equal-distance candidates reachable so index tie-breaks stay exact.
  if (static_cast<int>(best.size()) < k || delta * delta <= best.top().first) {
    search(far, query, k, best);
  }
}

std::vector<int> SpatialIndex::knn(const Vector& query, int k) const {
  if (query.size() != points_.cols()) throw std::invalid_argument("knn: dimension mismatch");
  if (k < 1 || k > points_.rows()) throw std::out_of_range("knn: k out of range");

  std::priority_queue<Entry> best;  // max-heap on (distance^2, index)
  search(0, query, k, best);

  std::vector<int> result(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    result[static_cast<std::size_t>(i)] = best.top().second;
    best.pop();
  }
  return result;
}

StencilTable select_stencils(const NodeSet& nodes, std::span<const int> sizes) {
  const Eigen::Index n = nodes.size();
  if (static_cast<Eigen::Index>(sizes.size()) != n) {
    throw std::invalid_argument("select_stencils: one size per node required");
  }
  for (const int size : sizes) {
    if (size < 1 || size > n) throw std::invalid_argument("select_stencils: stencil size out of range");
  }

  const SpatialIndex index(nodes.positions);
  StencilTable table;
  table.rows.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& row = table.rows[static_cast<std::size_t>(i)];
    row = index.knn(nodes.position(i), sizes[static_cast<std::size_t>(i)]);
    if (row.front() != static_cast<int>(i)) {
      throw std::runtime_error("select_stencils: duplicate node positions");
    }
  }
  return table;
}

void write_nodes(std::ostream& out, const NodeSet& nodes, std::span<const int> orders) {
  if (!orders.empty() && static_cast<Eigen::Index>(orders.size()) != nodes.size()) {
    throw std::invalid_argument("write_nodes: one order per node required");
  }
  char buf[64];
  out << "# d=" << nodes.dimension() << " h=";
  std::snprintf(buf, sizeof buf, "%.17g", nodes.h);
  out << buf << " N=" << nodes.size() << "\n";
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    for (int a = 0; a < nodes.dimension(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", nodes.positions(i, a));
      out << buf << ' ';
    }
    out << (nodes.is_boundary(i) ? 'b' : 'i') << ' '
        << (orders.empty() ? 0 : orders[static_cast<std::size_t>(i)]) << "\n";
  }
}

}  // namespace prefd
