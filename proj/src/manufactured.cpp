#include "slipflow/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "slipflow/constrain.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

namespace {
constexpr double kPi = std::numbers::pi;

// s^2 (1 - s)^2 and its first three derivatives.
std::array<double, 4> quartic(double s) {
  return {s * s * (1 - s) * (1 - s), 2 * s - 6 * s * s + 4 * s * s * s, 2 - 12 * s + 12 * s * s, -12 + 24 * s};
}
}  // namespace

ManufacturedStokes::ManufacturedStokes(double bottom, double top) : bottom_(bottom), height_(top - bottom) {}

Vec2 ManufacturedStokes::velocity(const Vec2& x) const {
  const auto X = quartic(x.x());
  const auto Y = quartic((x.y() - bottom_) / height_);
  return {X[0] * Y[1] / height_, -X[1] * Y[0]};
}

Eigen::Matrix2d ManufacturedStokes::velocity_gradient(const Vec2& x) const {
  const auto X = quartic(x.x());
  const auto Y = quartic((x.y() - bottom_) / height_);
  const double h = height_;
  Eigen::Matrix2d g;
  g << X[1] * Y[1] / h, X[0] * Y[2] / (h * h), -X[2] * Y[0], -X[1] * Y[1] / h;
  return g;
}

double ManufacturedStokes::pressure(const Vec2& x) const {
  return std::cos(kPi * x.x()) * std::cos(kPi * (x.y() - bottom_) / height_);
}

Vec2 ManufacturedStokes::force(const Vec2& x) const {
  const auto X = quartic(x.x());
  const double y = (x.y() - bottom_) / height_;
  const auto Y = quartic(y);
  const double h = height_;
  const double lap1 = X[2] * Y[1] / h + X[0] * Y[3] / (h * h * h);
  const double lap2 = -X[3] * Y[0] - X[1] * Y[2] / (h * h);
  const double dp1 = -kPi * std::sin(kPi * x.x()) * std::cos(kPi * y);
  const double dp2 = -kPi * std::cos(kPi * x.x()) * std::sin(kPi * y) / h;
  return {-lap1 + dp1, -lap2 + dp2};
}

BodyForce ManufacturedStokes::force_field() const {
  return [*this](const Vec2& x) { return force(x); };
}

double velocity_h1_error(const FemSpace& space, const Vector& u, const ManufacturedStokes& exact) {
  const auto& rule = triangle_rule();
  const auto& mesh = space.mesh;
  std::array<double, 6> phi;
  std::array<Vec2, 6> dphi;
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    const std::array<Vec2, 3> p = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    const double area = mesh.triangle_area(t);
    for (int q = 0; q < 6; ++q) {
      const auto& l = rule.points[q];
      p2_basis(p, l, phi, dphi);
      Eigen::Matrix2d gh = Eigen::Matrix2d::Zero();
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 2; ++c) gh.row(c) += u[space.velocity_dof(c, space.cell_nodes[t][i])] * dphi[i].transpose();
      const Vec2 x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
      sum += rule.weights[q] * area * (exact.velocity_gradient(x) - gh).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double pressure_l2_error(const FemSpace& space, const Vector& p, const ManufacturedStokes& exact) {
  const auto& rule = triangle_rule();
  const auto& mesh = space.mesh;
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (int q = 0; q < 6; ++q) {
      const auto& l = rule.points[q];
      Vec2 x = Vec2::Zero();
      double ph = 0.0;
      for (int k = 0; k < 3; ++k) {
        x += l[k] * mesh.vertices[tri[k]];
        ph += l[k] * p[tri[k]];
      }
      const double e = exact.pressure(x) - ph;
      sum += rule.weights[q] * area * e * e;
    }
  }
  return std::sqrt(sum);
}

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& levels, double bottom, double top) {
  const ManufacturedStokes exact(bottom, top);
  AdmissibleSetParams params;
  params.omega = top;
  params.alpha_min = std::min(params.alpha_min, 0.5 * bottom);
  params.alpha_max = std::max(bottom, 0.5 * (bottom + top));
  const auto shape = validate_shape(ShapeCandidate::constant(bottom), params);

  std::vector<ConvergenceRow> rows;
  for (int n : levels) {
    const auto space = build_space(build_mesh(shape, n, n), shape);
    const auto system = assemble(space, exact.force_field());
    const auto sol = solve_noslip_stokes(space, system);
    ConvergenceRow row{n, velocity_h1_error(space, sol.u, exact), pressure_l2_error(space, sol.p, exact)};
    if (!rows.empty()) {
      const auto& prev = rows.back();
      const double ratio = std::log(static_cast<double>(n) / prev.n);
      row.h1_rate = std::log(prev.h1_error / row.h1_error) / ratio;
      row.l2_rate = std::log(prev.l2_error / row.l2_error) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace slipflow
