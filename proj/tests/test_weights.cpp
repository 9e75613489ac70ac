#include "prefd/weights.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace prefd;

namespace {

Eigen::MatrixXd random_stencil(std::mt19937_64& gen, const Vector& center, double radius,
                               int n) {
  Eigen::MatrixXd pts(n, center.size());
  pts.row(0) = center.transpose();
  for (int i = 1; i < n; ++i) {
    pts.row(i) = oracle::random_in_disk(gen, center, radius).transpose();
  }
  return pts;
}

Eigen::VectorXd laplacian_weights(const Eigen::MatrixXd& pts, const Vector& center, int m) {
  const MonomialBasis mono(m, static_cast<int>(center.size()));
  return solve_local(assemble_local(pts, center, PhsBasis{3}, mono, OperatorTag::Laplacian));
}

}  // namespace

TEST_CASE("local system matches a long-hand construction (m = 2, d = 2)") {
  std::mt19937_64 gen(31);
  Vector c(2);
  c << 0.3, -0.2;
  const Eigen::MatrixXd pts = random_stencil(gen, c, 0.4, 12);

  const LocalSystem sys =
      assemble_local(pts, c, PhsBasis{3}, MonomialBasis(2, 2), OperatorTag::Laplacian);
  REQUIRE(sys.n == 12);
  REQUIRE(sys.s == 6);
  REQUIRE(sys.matrix.rows() == 18);
  REQUIRE(sys.rhs.size() == 18);

  // everything below is written out with explicit formulas, no library calls
  double scale = 0.0;
  for (int i = 0; i < 12; ++i) {
    scale = std::max(scale, (pts.row(i).transpose() - c).norm());
  }
  const int ex[6] = {0, 1, 0, 2, 1, 0};  // exponent pairs of 1, x, y, x^2, xy, y^2
  const int ey[6] = {0, 0, 1, 0, 1, 2};
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(18, 18);
  Eigen::VectorXd ref_rhs = Eigen::VectorXd::Zero(18);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      const double r = (pts.row(i) - pts.row(j)).norm();
      ref(i, j) = r * r * r;
    }
    const double sx = (pts(i, 0) - c[0]) / scale;
    const double sy = (pts(i, 1) - c[1]) / scale;
    for (int l = 0; l < 6; ++l) {
      ref(i, 12 + l) = std::pow(sx, ex[l]) * std::pow(sy, ey[l]);
      ref(12 + l, i) = ref(i, 12 + l);
    }
    const double rc = (pts.row(i).transpose() - c).norm();
    ref_rhs[i] = 9.0 * rc;  // laplacian of r^3 in two dimensions
  }
  ref_rhs[15] = 2.0 / (scale * scale);  // x^2 row
  ref_rhs[17] = 2.0 / (scale * scale);  // y^2 row

  CHECK((sys.matrix - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  CHECK((sys.rhs - ref_rhs).cwiseAbs().maxCoeff() <= 1e-12 * ref_rhs.cwiseAbs().maxCoeff());
  CHECK(sys.matrix.bottomRightCorner(6, 6).isZero(0.0));
  CHECK(sys.matrix.isApprox(sys.matrix.transpose()));
}

TEST_CASE("local system validation") {
  std::mt19937_64 gen(32);
  const Vector c = Vector::Zero(2);
  Eigen::MatrixXd pts = random_stencil(gen, c, 0.5, 12);
  const MonomialBasis mono(2, 2);

  CHECK_THROWS_AS(assemble_local(Eigen::MatrixXd(0, 2), c, PhsBasis{3}, mono,
                                 OperatorTag::Laplacian),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_local(pts.topRows(5), c, PhsBasis{3}, mono,
                                 OperatorTag::Laplacian),
                  std::invalid_argument);  // fewer points than monomials
  CHECK_THROWS_AS(assemble_local(pts, Vector::Zero(3), PhsBasis{3}, mono,
                                 OperatorTag::Laplacian),
                  std::invalid_argument);

  pts.row(7) = pts.row(3);
  CHECK_THROWS_AS(assemble_local(pts, c, PhsBasis{3}, mono, OperatorTag::Laplacian),
                  std::invalid_argument);
}

TEST_CASE("identity weights at the center collapse to a delta") {
  std::mt19937_64 gen(33);
  Vector c(2);
  c << 0.1, 0.9;
  const Eigen::MatrixXd pts = random_stencil(gen, c, 0.3, 12);
  const Eigen::VectorXd w =
      solve_local(assemble_local(pts, c, PhsBasis{3}, MonomialBasis(2, 2), OperatorTag::Identity));
  REQUIRE(w.size() == 12);
  CHECK(std::abs(w[0] - 1.0) <= 1e-10);
  CHECK(w.tail(11).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("laplacian weights reproduce polynomials through the augmentation degree") {
  std::mt19937_64 gen(34);
  for (int m : {2, 4, 6}) {
    const int n = stencil_size_for_order(m, 2);
    const MonomialBasis mono(m, 2);
    for (int trial = 0; trial < 12; ++trial) {
      Vector c(2);
      c << 2.0 * rng::uniform01(gen) - 1.0, 2.0 * rng::uniform01(gen) - 1.0;
      const Eigen::MatrixXd pts = random_stencil(gen, c, 0.5, n);
      const Eigen::VectorXd w = laplacian_weights(pts, c, m);

      for (int l = 0; l < mono.size(); ++l) {
        const auto alpha = mono.exponent(l);
        double applied = 0.0, witness = 0.0;
        for (int i = 0; i < n; ++i) {
          const Vector rel = pts.row(i).transpose() - c;
          const double term = w[i] * monomial_eval(alpha, rel);
          applied += term;
          witness = std::max(witness, std::abs(term));
        }
        const double exact = monomial_apply(OperatorTag::Laplacian, alpha, Vector::Zero(2));
        CHECK(std::abs(applied - exact) <= 1e-8 * std::max(1.0, witness));
      }
    }
  }
}

TEST_CASE("consistency sums at realistic spacings") {
  // sum w = 0 and sum w |x - c|^2 = 2 d must hold even when the stencil is
  // tiny and the weights are O(1/h^2)
  std::mt19937_64 gen(35);
  for (double radius : {0.5, 1e-3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector c = oracle::random_in_disk(gen, Vector::Zero(2), 1.0);
      const Eigen::MatrixXd pts = random_stencil(gen, c, radius, 12);
      const Eigen::VectorXd w = laplacian_weights(pts, c, 2);

      double quad = 0.0;
      for (int i = 0; i < 12; ++i) {
        quad += w[i] * (pts.row(i).transpose() - c).squaredNorm();
      }
      CHECK(std::abs(w.sum()) <= 1e-8 * w.cwiseAbs().sum());
      CHECK(std::abs(quad - 4.0) <= 1e-8 * 4.0);
    }
  }
}

TEST_CASE("frame equivariance of the laplacian weights") {
  std::mt19937_64 gen(36);
  Vector c(2);
  c << -0.4, 0.25;
  const Eigen::MatrixXd pts = random_stencil(gen, c, 0.3, 12);
  const Eigen::VectorXd w = laplacian_weights(pts, c, 2);

  SUBCASE("translation leaves weights unchanged") {
    Vector t(2);
    t << 13.5, -7.25;
    const Eigen::MatrixXd shifted = pts.rowwise() + t.transpose();
    const Eigen::VectorXd ws = laplacian_weights(shifted, c + t, 2);
    CHECK((ws - w).cwiseAbs().maxCoeff() <= 1e-8 * w.cwiseAbs().maxCoeff());
  }

  SUBCASE("rotation about the center leaves weights unchanged") {
    const double a = 0.7;
    Eigen::Matrix2d rot;
    rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    Eigen::MatrixXd rotated(pts.rows(), 2);
    for (int i = 0; i < pts.rows(); ++i) {
      rotated.row(i) = c.transpose() + (pts.row(i) - c.transpose()) * rot.transpose();
    }
    const Eigen::VectorXd wr = laplacian_weights(rotated, c, 2);
    CHECK((wr - w).cwiseAbs().maxCoeff() <= 1e-7 * w.cwiseAbs().maxCoeff());
  }

  SUBCASE("shrinking the stencil scales weights by the inverse square") {
    const double lambda = 0.01;
    Eigen::MatrixXd shrunk(pts.rows(), 2);
    for (int i = 0; i < pts.rows(); ++i) {
      shrunk.row(i) = c.transpose() + lambda * (pts.row(i) - c.transpose());
    }
    const Eigen::VectorXd wl = laplacian_weights(shrunk, c, 2);
    CHECK((wl * lambda * lambda - w).cwiseAbs().maxCoeff() <=
          1e-7 * w.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("grid stencil recovers the second-order laplacian") {
  // center plus its 12 nearest grid neighbors (the distance-2g ring closes
  // the set symmetrically); the discrete laplacian of a smooth function then
  // converges at second order as the grid shrinks
  auto f = [](const Vector& x) { return std::sin(x[0]) * std::cos(2.0 * x[1]); };
  auto lap_f = [](const Vector& x) { return -5.0 * std::sin(x[0]) * std::cos(2.0 * x[1]); };
  Vector c(2);
  c << 0.4, 0.7;

  const int ox[13] = {0, 1, -1, 0, 0, 1, 1, -1, -1, 2, -2, 0, 0};
  const int oy[13] = {0, 0, 0, 1, -1, 1, -1, 1, -1, 0, 0, 2, -2};
  auto error_at = [&](double g) {
    Eigen::MatrixXd pts(13, 2);
    for (int i = 0; i < 13; ++i) {
      pts.row(i) << c[0] + g * ox[i], c[1] + g * oy[i];
    }
    const Eigen::VectorXd w = laplacian_weights(pts, c, 2);
    double applied = 0.0;
    for (int i = 0; i < 13; ++i) applied += w[i] * f(pts.row(i).transpose());
    return std::abs(applied - lap_f(c));
  };

  const double coarse = error_at(0.04);
  const double fine = error_at(0.02);
  CHECK(fine < coarse);
  CHECK(std::log2(coarse / fine) >= 1.5);
}

TEST_CASE("degenerate geometry is reported as singular") {
  // twelve collinear points cannot fix the y-dependent monomials
  Eigen::MatrixXd pts(12, 2);
  for (int i = 0; i < 12; ++i) pts.row(i) << 0.1 * i, 0.0;
  const LocalSystem sys = assemble_local(pts, pts.row(0).transpose(), PhsBasis{3},
                                         MonomialBasis(2, 2), OperatorTag::Laplacian);
  CHECK_THROWS_AS(solve_local(sys), SingularLocalSystem);
}

TEST_CASE("weights for a full node set") {
  BallDomain ball(Vector::Zero(2), 1.5);
  const double h = 0.12;
  const NodeSet nodes = fill_interior(ball, ball.discretize_boundary(h, 1), h, 1);
  const OrderField orders = assign_orders(nodes, preset("c3"));
  const StencilTable stencils = select_stencils(nodes, orders.n);

  const auto weights =
      compute_all_weights(nodes, stencils, orders, PhsBasis{3}, OperatorTag::Laplacian);
  REQUIRE(static_cast<Eigen::Index>(weights.size()) == nodes.interior_count());

  int prev = -1;
  for (const StencilWeights& sw : weights) {
    CHECK(sw.center > prev);
    prev = sw.center;
    CHECK(!nodes.is_boundary(sw.center));
    REQUIRE(!sw.neighbors.empty());
    CHECK(sw.neighbors.front() == sw.center);
    CHECK(sw.w.size() == static_cast<Eigen::Index>(sw.neighbors.size()));
    CHECK(sw.w.allFinite());
    CHECK(std::abs(sw.w.sum()) <= 1e-8 * sw.w.cwiseAbs().sum());
  }

  SUBCASE("thread count does not change the result") {
    const auto threaded =
        compute_all_weights(nodes, stencils, orders, PhsBasis{3}, OperatorTag::Laplacian, 4);
    REQUIRE(threaded.size() == weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      CHECK(threaded[i].center == weights[i].center);
      CHECK(threaded[i].w == weights[i].w);
    }
  }

  SUBCASE("inconsistent order table is rejected") {
    OrderField bad = orders;
    bad.n[static_cast<std::size_t>(nodes.boundary_count())] += 1;
    CHECK_THROWS_AS(
        compute_all_weights(nodes, stencils, bad, PhsBasis{3}, OperatorTag::Laplacian),
        std::invalid_argument);
    CHECK_THROWS_AS(
        compute_all_weights(nodes, stencils, OrderField{}, PhsBasis{3}, OperatorTag::Laplacian),
        std::invalid_argument);
  }
}

TEST_CASE("failures are aggregated per node") {
  // collinear interior nodes: every local solve is singular
  NodeSet nodes;
  const int count = 30;
  nodes.positions.resize(count, 2);
  for (int i = 0; i < count; ++i) nodes.positions.row(i) << 0.1 * i, 0.0;
  nodes.kind.assign(count, NodeKind::Interior);
  nodes.h = 0.1;

  OrderField orders;
  orders.m.assign(count, 2);
  orders.n.assign(count, stencil_size_for_order(2, 2));
  const StencilTable stencils = select_stencils(nodes, orders.n);

  try {
    compute_all_weights(nodes, stencils, orders, PhsBasis{3}, OperatorTag::Laplacian, 3);
    FAIL("expected WeightFailure");
  } catch (const WeightFailure& failure) {
    CHECK(failure.nodes().size() == count);
    CHECK(failure.nodes().front() == 0);
    CHECK(failure.nodes().back() == count - 1);
    CHECK(std::string(failure.what()).find("30 node(s) failed") != std::string::npos);
  }
}

TEST_CASE("weight dump format") {
  std::vector<StencilWeights> weights(1);
  weights[0].center = 7;
  weights[0].neighbors = {7, 3, 9};
  weights[0].w = Eigen::Vector3d(0.5, -0.25, 0.125);
  std::ostringstream out;
  write_weights(out, weights);
  CHECK(out.str() == "7 3 7 3 9 0.5 -0.25 0.125\n");
}
