#pragma once

#include <span>
#include <vector>

namespace slipflow {

/// Clamped cubic spline on uniform knots spanning [0, 1].
///
/// The end slopes are either given or, via `from_controls`, taken from the
/// cubic through the four outermost control values at each end, so that
/// cubic data is reproduced exactly.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> values, double slope_left, double slope_right);

  static CubicSpline from_controls(std::span<const double> values);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double> knots() const;
  int pieces() const { return static_cast<int>(values_.size()) - 1; }

 private:
  // Piece index and local offset for x clamped into [0, 1].
  std::pair<int, double> locate(double x) const;

  std::vector<double> values_;
  std::vector<double> moments_;  // second derivatives at knots
  double h_;
};

}  // namespace slipflow
