#include "slipflow/slip_bound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slipflow {

SlipBound::SlipBound(Family family, std::function<double(double)> fn, double g_min, double g_max, double lipschitz)
    : family_(family), fn_(std::move(fn)), g_min_(g_min), g_max_(g_max), lipschitz_(lipschitz) {}

SlipBound SlipBound::constant(double g0) {
  return {Family::Constant, [g0](double) { return g0; }, g0, g0, 0.0};
}

SlipBound SlipBound::linear_saturating(double g0, double lipschitz, double t_max) {
  return {Family::LinearSaturating, [=](double t) { return g0 + lipschitz * std::min(t, t_max); }, g0,
          g0 + lipschitz * t_max, lipschitz};
}

SlipBound SlipBound::weakening(double g0, double lipschitz, double t_max) {
  return {Family::Weakening, [=](double t) { return g0 + lipschitz * (t_max - std::min(t, t_max)); }, g0,
          g0 + lipschitz * t_max, lipschitz};
}

SlipBound SlipBound::custom(std::function<double(double)> fn, double g_min, double g_max, double lipschitz) {
  return {Family::Custom, std::move(fn), g_min, g_max, lipschitz};
}

Eigen::VectorXd SlipBound::apply(const Eigen::VectorXd& phi) const {
  return phi.unaryExpr([this](double t) { return fn_(t); });
}

std::string SlipBound::describe() const {
  std::ostringstream os;
  os << "g in [" << g_min_ << ", " << g_max_ << "], L = " << lipschitz_;
  return os.str();
}

void SlipBound::validate(double t_check, int samples) const {
  if (!(g_min_ > 0.0)) throw std::invalid_argument("slip bound requires g_min > 0");
  if (g_max_ < g_min_) throw std::invalid_argument("slip bound requires g_min <= g_max");
  if (lipschitz_ < 0.0) throw std::invalid_argument("slip bound requires L >= 0");
  const double slack = 1e-12 * std::max(1.0, g_max_);
  double prev_t = 0.0, prev_g = fn_(0.0);
  for (int i = 0; i < samples; ++i) {
    const double t = t_check * i / (samples - 1);
    const double g = fn_(t);
    if (!(g >= g_min_ - slack && g <= g_max_ + slack))
      throw std::invalid_argument("slip bound leaves [g_min, g_max] at t = " + std::to_string(t));
    if (i > 0 && std::abs(g - prev_g) > lipschitz_ * (t - prev_t) + slack)
      throw std::invalid_argument("slip bound exceeds its Lipschitz constant near t = " + std::to_string(t));
    prev_t = t;
    prev_g = g;
  }
}

}  // namespace slipflow
