#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace slipflow {

/// Slip threshold g(t) as a function of the tangential speed t >= 0.
class SlipBound {
 public:
  enum class Family { Constant, LinearSaturating, Weakening, Custom };

  /// g(t) = g0.
  static SlipBound constant(double g0);
  /// g(t) = g0 + L min(t, t_max); increasing, saturates at g0 + L t_max.
  static SlipBound linear_saturating(double g0, double lipschitz, double t_max);
  /// g(t) = g0 + L (t_max - min(t, t_max)); decreasing from g0 + L t_max to g0.
  static SlipBound weakening(double g0, double lipschitz, double t_max);
  static SlipBound custom(std::function<double(double)> fn, double g_min, double g_max, double lipschitz);

  double operator()(double t) const { return fn_(t); }
  Eigen::VectorXd apply(const Eigen::VectorXd& phi) const;

  Family family() const { return family_; }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }
  double lipschitz() const { return lipschitz_; }
  std::string describe() const;

  /// Checks g_min > 0, g_min <= g <= g_max and the Lipschitz bound on
  /// `samples` uniform points of [0, t_check]. Throws std::invalid_argument.
  void validate(double t_check = 10.0, int samples = 10001) const;

 private:
  SlipBound(Family family, std::function<double(double)> fn, double g_min, double g_max, double lipschitz);

  Family family_;
  std::function<double(double)> fn_;
  double g_min_, g_max_, lipschitz_;
};

}  // namespace slipflow
