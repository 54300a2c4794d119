#include "slipflow/errors.hpp"

#include <cstdio>

#include <sstream>

namespace slipflow {

namespace {
std::string describe_violation(const std::string& which, double x1, double value) {
  std::ostringstream os;
  os << "constraint '" << which << "' violated at x1 = " << x1 << " (value " << value << ")";
  return os.str();
}
}  // namespace

ConstraintViolation::ConstraintViolation(std::string which, double x1, double value)
    : std::runtime_error(describe_violation(which, x1, value)), which_(std::move(which)), x1_(x1), value_(value) {}

DegenerateCell::DegenerateCell(int triangle, double area)
    : std::runtime_error("triangle " + std::to_string(triangle) + " has non-positive area " + std::to_string(area)),
      triangle_(triangle) {}

namespace {
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
}  // namespace

NoConvergence::NoConvergence(const std::string& what, int iterations, double residual)
    : std::runtime_error(what + ": no convergence after " + std::to_string(iterations) + " iterations (residual " +
                         short_number(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

NonPositivePhi::NonPositivePhi(int node, double value)
    : std::runtime_error("phi must be nonnegative; node " + std::to_string(node) + " has " + std::to_string(value)) {}

}  // namespace slipflow
