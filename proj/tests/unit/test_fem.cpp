#include <doctest.h>

#include <cmath>
#include <random>

#include "slipflow/constrain.hpp"
#include "slipflow/forces.hpp"
#include "slipflow/manufactured.hpp"
#include "slipflow/mesh.hpp"

using namespace slipflow;

namespace {

struct Setup {
  FemSpace space;
  AssembledSystem system;
};

Setup setup(const ShapeCandidate& c, int n, const BodyForce& f) {
  const auto shape = validate_shape(c, AdmissibleSetParams{});
  auto space = build_space(build_mesh(shape, n, n), shape);
  auto system = assemble(space, f);
  return {std::move(space), std::move(system)};
}

const ShapeCandidate kSine = ShapeCandidate::sine(0.5, 0.05, 1.0);

}  // namespace

TEST_CASE("P2 stiffness of the unit reference triangle") {
  // Exact integrals of the basis gradients, computed symbolically
  // (tests/oracles/p2_reference_stiffness.py), times 6.
  const double ref[6][6] = {{6, 1, 1, -4, 0, -4},  {1, 3, 0, -4, 0, 0},    {1, 0, 3, 0, 0, -4},
                            {-4, -4, 0, 16, -8, 0}, {0, 0, 0, -8, 16, -8}, {-4, 0, -4, 0, -8, 16}};
  const auto K = p2_stiffness({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(std::abs(K(i, j) - ref[i][j] / 6.0) <= 1e-12);
}

TEST_CASE("quadrature rules") {
  const auto& r = triangle_rule();
  double sum = 0.0, x2y2 = 0.0;
  for (int q = 0; q < 6; ++q) {
    sum += r.weights[q];
    const double x = r.points[q][1], y = r.points[q][2];
    x2y2 += r.weights[q] * x * x * y * y;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  // Integral of x^2 y^2 over the reference triangle is 1/180; weights are per unit area.
  CHECK(x2y2 * 0.5 == doctest::Approx(1.0 / 180.0).epsilon(1e-14));
  double e5 = 0.0;
  for (int q = 0; q < 3; ++q) e5 += kEdgeGauss.weights[q] * std::pow(kEdgeGauss.points[q], 5);
  CHECK(e5 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("dof layout of the two by two mesh") {
  const auto s = setup(ShapeCandidate::constant(0.5), 2, constant_force(Vec2(1, 0)));
  const auto& sp = s.space;
  CHECK(sp.velocity_dofs() == 50);
  CHECK(sp.pressure_dofs() == 9);
  // Every P2 node on the closed slip boundary, corners included.
  REQUIRE(sp.slip_count() == 5);
  CHECK(sp.active_slip.size() == 3);
  for (int j = 0; j < 5; ++j) CHECK(sp.slip_nodes[j].x1 == doctest::Approx(0.25 * j));
  CHECK(sp.slip_nodes.front().corner);
  CHECK(sp.slip_nodes.back().corner);
  for (int j = 0; j < 5; ++j) CHECK(bool(sp.on_gamma[sp.slip_nodes[j].node]) == sp.slip_nodes[j].corner);
  // Boundary nodes: 8 edges with a midpoint each plus 8 boundary vertices.
  CHECK(sp.gamma_dofs.size() == 2 * (16 - 3));
  for (int d : sp.gamma_dofs) CHECK((d >= 0 && d < sp.velocity_dofs()));
}

TEST_CASE("gamma and slip sets agree with the boundary tags") {
  const auto s = setup(kSine, 4, constant_force(Vec2(0, 0)));
  const auto& sp = s.space;
  for (int k = 0; k < sp.n_p2; ++k) {
    const Vec2 x = sp.nodes[k];
    const bool wall = x.x() == 0.0 || x.x() == 1.0 || x.y() == 1.5;
    // Edge midpoints sit on the chord, within h^2/8 max|alpha"| of the curve.
    const bool bottom = std::abs(x.y() - kSine.value(x.x())) <= 0.02 && x.y() < 1.0;
    CHECK(bool(sp.on_gamma[k]) == wall);
    CHECK(bool(sp.on_slip[k]) == bottom);
  }
}

TEST_CASE("constants are in the kernel of A and B") {
  const auto s = setup(kSine, 4, constant_force(Vec2(0, 0)));
  const Vector one = Vector::Ones(s.space.velocity_dofs());
  CHECK((s.system.A * one).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((s.system.B * one).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((s.system.A - SparseMatrix(s.system.A.transpose())).norm() <= 1e-12);
}

TEST_CASE("load and mass partition of unity") {
  const auto s = setup(ShapeCandidate::constant(0.5), 4, constant_force(Vec2(1, 0)));
  const int n = s.space.n_p2;
  CHECK(s.system.F.head(n).sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(s.system.F.tail(n).sum()) <= 1e-15);
  CHECK(s.system.pressure_mean.sum() == doctest::Approx(1.0).epsilon(1e-14));
  const Vector ones = Vector::Ones(s.space.pressure_dofs());
  CHECK(ones.dot(s.system.Mp * ones) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lumped slip mass integrates arclength") {
  const auto s = setup(kSine, 16, constant_force(Vec2(0, 0)));
  // Composite Simpson reference for int sqrt(1 + alpha'^2).
  const int m = 20000;
  double ref = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / m;
    const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
    ref += w * std::sqrt(1 + std::pow(kSine.slope(x), 2));
  }
  ref /= 3.0 * m;
  CHECK(s.system.W.sum() == doctest::Approx(ref).epsilon(1e-9));
  for (int j = 0; j < s.space.slip_count(); ++j) CHECK(s.system.W[j] > 0.0);
}

TEST_CASE("traces on the flat bottom") {
  const auto s = setup(ShapeCandidate::constant(0.5), 3, constant_force(Vec2(0, 0)));
  const Vector T = s.system.T * Vector::LinSpaced(s.space.velocity_dofs(), 1, s.space.velocity_dofs());
  const Vector N = s.system.N * Vector::LinSpaced(s.space.velocity_dofs(), 1, s.space.velocity_dofs());
  for (int j = 0; j < s.space.slip_count(); ++j) {
    const int k = s.space.slip_nodes[j].node;
    CHECK(T[j] == doctest::Approx(1.0 + s.space.velocity_dof(0, k)));
    CHECK(N[j] == doctest::Approx(-(1.0 + s.space.velocity_dof(1, k))));
  }
}

TEST_CASE("strong mode on a flat bottom eliminates the vertical component") {
  const auto s = setup(ShapeCandidate::constant(0.5), 3, constant_force(Vec2(0, 0)));
  const ConstrainedSystem cs(s.space, s.system, ImpermeabilityMode::Strong, false);
  const SparseMatrix Qt = cs.expansion().transpose();
  const Eigen::MatrixXd Q = Eigen::MatrixXd(cs.expansion());
  for (int j : s.space.active_slip) {
    const int k = s.space.slip_nodes[j].node;
    CHECK(Q.row(s.space.velocity_dof(1, k)).norm() == 0.0);
    const auto row = Q.row(s.space.velocity_dof(0, k));
    CHECK(row.cwiseAbs().maxCoeff() == 1.0);
    CHECK(row.cwiseAbs().sum() == 1.0);
  }
}

TEST_CASE("expanded vectors vanish on gamma and are impermeable in strong mode") {
  const auto s = setup(kSine, 6, constant_force(Vec2(0, 0)));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (auto mode : {ImpermeabilityMode::Strong, ImpermeabilityMode::Weak, ImpermeabilityMode::NoSlip}) {
    const ConstrainedSystem cs(s.space, s.system, mode, false);
    for (int trial = 0; trial < 5; ++trial) {
      Vector r(cs.reduced_velocity_dofs());
      for (auto& v : r) v = normal(rng);
      const Vector u = cs.expand(r);
      for (int d : s.space.gamma_dofs) CHECK(u[d] == 0.0);
      if (mode != ImpermeabilityMode::Weak)
        for (int j = 0; j < s.space.slip_count(); ++j) CHECK(std::abs((s.system.N * u)[j]) <= 1e-12);
    }
  }
}

TEST_CASE("saddle matrices are symmetric") {
  const auto s = setup(kSine, 4, constant_force(Vec2(0, 0)));
  for (auto mode : {ImpermeabilityMode::Strong, ImpermeabilityMode::Weak, ImpermeabilityMode::NoSlip}) {
    const ConstrainedSystem cs(s.space, s.system, mode);
    const SparseMatrix& S = cs.saddle_matrix();
    CHECK((S - SparseMatrix(S.transpose())).norm() <= 1e-14 * S.norm());
  }
}

TEST_CASE("a gradient force is balanced by pressure alone") {
  // f = grad(x1): u = 0 and p = x1 - 1/2, which P1 represents exactly.
  const auto s = setup(ShapeCandidate::constant(0.5), 4, constant_force(Vec2(1, 0)));
  for (auto mode : {ImpermeabilityMode::Strong, ImpermeabilityMode::Weak, ImpermeabilityMode::NoSlip}) {
    const ConstrainedSystem cs(s.space, s.system, mode);
    const auto sol = cs.solve(s.system.F);
    CHECK(sol.u.lpNorm<Eigen::Infinity>() <= 1e-12);
    for (int v = 0; v < s.space.n_vertices; ++v)
      CHECK(std::abs(sol.p[v] - (s.space.nodes[v].x() - 0.5)) <= 1e-12);
  }
}

TEST_CASE("weak-mode discrete divergence on a curved bottom") {
  // Only the pressure mean is unconstrained, so B u lies in span(Mp 1).
  const auto s = setup(kSine, 8, shear_force(10.0));
  const ConstrainedSystem cs(s.space, s.system, ImpermeabilityMode::Weak);
  const auto sol = cs.solve(s.system.F);
  const Vector div = s.system.B * sol.u;
  const Vector& m = s.system.pressure_mean;
  const Vector residual = div - m * (m.dot(div) / m.dot(m));
  CHECK(residual.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((s.system.N * sol.u).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(std::abs(s.system.pressure_mean.dot(sol.p)) <= 1e-12);
}

TEST_CASE("manufactured solution converges at second order") {
  const auto rows = convergence_study({8, 16, 32});
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].h1_rate >= 1.8);
    CHECK(rows[i].l2_rate >= 1.8);
  }
}

TEST_CASE("manufactured data are consistent") {
  // Finite differences of the exact velocity against its gradient, and the
  // divergence of the exact velocity.
  const ManufacturedStokes ms(0.5, 1.5);
  const double h = 1e-6;
  for (const Vec2& x : {Vec2(0.3, 0.8), Vec2(0.7, 1.2)}) {
    const auto g = ms.velocity_gradient(x);
    for (int d = 0; d < 2; ++d) {
      Vec2 e = Vec2::Zero();
      e[d] = h;
      const Vec2 fd = (ms.velocity(x + e) - ms.velocity(x - e)) / (2 * h);
      CHECK(std::abs(fd[0] - g(0, d)) <= 1e-8);
      CHECK(std::abs(fd[1] - g(1, d)) <= 1e-8);
    }
    CHECK(std::abs(g.trace()) <= 1e-15);
  }
}
