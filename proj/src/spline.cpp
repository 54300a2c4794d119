#include "slipflow/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slipflow {

CubicSpline::CubicSpline(std::vector<double> values, double slope_left, double slope_right)
    : values_(std::move(values)) {
  const int n = static_cast<int>(values_.size()) - 1;
  if (n < 1) throw std::invalid_argument("CubicSpline: need at least two values");
  h_ = 1.0 / n;

  // Tridiagonal system for the knot moments (Thomas algorithm).
  const auto& y = values_;
  std::vector<double> sub(n + 1, 1.0), diag(n + 1, 4.0), sup(n + 1, 1.0), rhs(n + 1);
  diag[0] = 2.0;
  diag[n] = 2.0;
  rhs[0] = 6.0 / h_ * ((y[1] - y[0]) / h_ - slope_left);
  rhs[n] = 6.0 / h_ * (slope_right - (y[n] - y[n - 1]) / h_);
  for (int i = 1; i < n; ++i) rhs[i] = 6.0 / (h_ * h_) * (y[i + 1] - 2.0 * y[i] + y[i - 1]);

  for (int i = 1; i <= n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  moments_.assign(n + 1, 0.0);
  moments_[n] = rhs[n] / diag[n];
  for (int i = n - 1; i >= 0; --i) moments_[i] = (rhs[i] - sup[i] * moments_[i + 1]) / diag[i];
}

CubicSpline CubicSpline::from_controls(std::span<const double> values) {
  if (values.size() < 4) throw std::invalid_argument("CubicSpline: need at least four control values");
  const int n = static_cast<int>(values.size()) - 1;
  const double h = 1.0 / n;
  const auto& y = values;
  // Slopes of the interpolating cubics through the four end values.
  const double left = (-11.0 * y[0] + 18.0 * y[1] - 9.0 * y[2] + 2.0 * y[3]) / (6.0 * h);
  const double right = (11.0 * y[n] - 18.0 * y[n - 1] + 9.0 * y[n - 2] - 2.0 * y[n - 3]) / (6.0 * h);
  return CubicSpline(std::vector<double>(values.begin(), values.end()), left, right);
}

std::pair<int, double> CubicSpline::locate(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  int i = static_cast<int>(std::floor(x / h_));
  i = std::clamp(i, 0, pieces() - 1);
  return {i, x - i * h_};
}

double CubicSpline::value(double x) const {
  const auto [i, t] = locate(x);
  const double a = h_ - t;
  const double mi = moments_[i], mj = moments_[i + 1];
  return mi * a * a * a / (6.0 * h_) + mj * t * t * t / (6.0 * h_) +
         (values_[i] - mi * h_ * h_ / 6.0) * a / h_ + (values_[i + 1] - mj * h_ * h_ / 6.0) * t / h_;
}

double CubicSpline::derivative(double x) const {
  const auto [i, t] = locate(x);
  const double a = h_ - t;
  const double mi = moments_[i], mj = moments_[i + 1];
  return -mi * a * a / (2.0 * h_) + mj * t * t / (2.0 * h_) + (values_[i + 1] - values_[i]) / h_ -
         (mj - mi) * h_ / 6.0;
}

double CubicSpline::second_derivative(double x) const {
  const auto [i, t] = locate(x);
  return (moments_[i] * (h_ - t) + moments_[i + 1] * t) / h_;
}

std::vector<double> CubicSpline::knots() const {
  std::vector<double> k(values_.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i) * h_;
  return k;
}

}  // namespace slipflow
