#pragma once

#include <vector>

#include "slipflow/fem.hpp"

namespace slipflow {

/// Smooth Stokes solution on the rectangle (0,1) x (bottom, top) with
/// u = curl(psi), psi = X(x1) Y(y), X(s) = Y(s) = s^2 (1-s)^2,
/// y = (x2 - bottom) / (top - bottom), and p = cos(pi x1) cos(pi y).
/// u vanishes on the whole boundary and p has zero mean.
class ManufacturedStokes {
 public:
  ManufacturedStokes(double bottom, double top);

  Vec2 velocity(const Vec2& x) const;
  Eigen::Matrix2d velocity_gradient(const Vec2& x) const;  // (c, d) = d u_c / d x_d
  double pressure(const Vec2& x) const;
  Vec2 force(const Vec2& x) const;  // -Laplace u + grad p
  BodyForce force_field() const;

 private:
  double bottom_, height_;
};

struct ConvergenceRow {
  int n = 0;
  double h1_error = 0.0;  // |u - u_h|_1
  double l2_error = 0.0;  // ||p - p_h||_0
  double h1_rate = 0.0;   // against the previous row; 0 for the first
  double l2_rate = 0.0;
};

/// Quadrature errors of a discrete (u, p) against the manufactured solution.
double velocity_h1_error(const FemSpace& space, const Vector& u, const ManufacturedStokes& exact);
double pressure_l2_error(const FemSpace& space, const Vector& p, const ManufacturedStokes& exact);

/// No-slip Stokes solves on the flat channel alpha = bottom for each n.
std::vector<ConvergenceRow> convergence_study(const std::vector<int>& levels, double bottom = 0.5, double top = 1.5);

}  // namespace slipflow
