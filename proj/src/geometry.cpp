#include "slipflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "slipflow/errors.hpp"

namespace slipflow {

void AdmissibleSetParams::validate() const {
  if (!(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < omega))
    throw std::invalid_argument("admissible set requires 0 < alpha_min < alpha_max < omega");
  if (!(c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("admissible set requires c1, c2 > 0");
}

ShapeCandidate::ShapeCandidate(Fn value, Fn slope, Fn curvature, std::vector<double> breakpoints)
    : value_(std::move(value)),
      slope_(std::move(slope)),
      curvature_(std::move(curvature)),
      breakpoints_(std::move(breakpoints)) {}

ShapeCandidate ShapeCandidate::constant(double alpha) {
  return {[alpha](double) { return alpha; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ShapeCandidate ShapeCandidate::sine(double mean, double amplitude, double frequency) {
  const double k = 2.0 * std::numbers::pi * frequency;
  return {[=](double x) { return mean + amplitude * std::sin(k * x); },
          [=](double x) { return amplitude * k * std::cos(k * x); },
          [=](double x) { return -amplitude * k * k * std::sin(k * x); }};
}

ShapeCandidate ShapeCandidate::spline(std::span<const double> controls) {
  auto s = std::make_shared<const CubicSpline>(CubicSpline::from_controls(controls));
  ShapeCandidate c([s](double x) { return s->value(x); }, [s](double x) { return s->derivative(x); },
                   [s](double x) { return s->second_derivative(x); }, s->knots());
  c.controls_ = std::vector<double>(controls.begin(), controls.end());
  return c;
}

ShapeCandidate ShapeCandidate::plus(const ShapeCandidate& direction, double delta) const {
  auto a = *this;
  auto b = direction;
  std::vector<double> bp = breakpoints_;
  bp.insert(bp.end(), direction.breakpoints_.begin(), direction.breakpoints_.end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return {[a, b, delta](double x) { return a.value(x) + delta * b.value(x); },
          [a, b, delta](double x) { return a.slope(x) + delta * b.slope(x); },
          [a, b, delta](double x) { return a.curvature(x) + delta * b.curvature(x); }, std::move(bp)};
}

BoundaryShape validate_shape(const ShapeCandidate& candidate, const AdmissibleSetParams& params,
                             int grid_intervals) {
  params.validate();
  if (grid_intervals < 1) throw std::invalid_argument("validate_shape: grid must have at least one interval");

  std::vector<double> xs;
  xs.reserve(grid_intervals + 1 + candidate.breakpoints().size());
  for (int i = 0; i <= grid_intervals; ++i) xs.push_back(static_cast<double>(i) / grid_intervals);
  for (double b : candidate.breakpoints())
    if (b >= 0.0 && b <= 1.0) xs.push_back(b);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  for (double x : xs) {
    const double a = candidate.value(x);
    if (!std::isfinite(a) || a < params.alpha_min) throw ConstraintViolation("alpha_min", x, a);
    if (a > params.alpha_max) throw ConstraintViolation("alpha_max", x, a);
    const double d1 = candidate.slope(x);
    if (!std::isfinite(d1) || std::abs(d1) > params.c1) throw ConstraintViolation("slope", x, d1);
    const double d2 = candidate.curvature(x);
    if (!std::isfinite(d2) || std::abs(d2) > params.c2) throw ConstraintViolation("curvature", x, d2);
  }
  return BoundaryShape(candidate, params);
}

BoundaryFrame frame_from_slope(double slope) {
  const double w = std::sqrt(1.0 + slope * slope);
  return {Vec2(slope / w, -1.0 / w), Vec2(1.0 / w, slope / w), w};
}

BoundaryFrame boundary_frame(const BoundaryShape& shape, double x1) { return frame_from_slope(shape.slope(x1)); }

double c1_distance(const BoundaryShape& a, const BoundaryShape& b, int grid_intervals) {
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i <= grid_intervals; ++i) {
    const double x = static_cast<double>(i) / grid_intervals;
    d0 = std::max(d0, std::abs(a.alpha(x) - b.alpha(x)));
    d1 = std::max(d1, std::abs(a.slope(x) - b.slope(x)));
  }
  return d0 + d1;
}

ShapeFile read_shape_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open shape file " + path.string());

  ShapeFile file;
  bool have_omega = false;
  int expected = -1;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "omega") {
      if (!(ls >> file.omega)) fail("expected a value after 'omega'");
      have_omega = true;
    } else if (head == "controls") {
      if (!(ls >> expected) || expected < 4) fail("expected a control count >= 4");
    } else {
      if (expected < 0) fail("control values before 'controls <m>'");
      double x = 0.0, a = 0.0;
      std::istringstream row(line);
      if (!(row >> x >> a)) fail("expected 'x alpha'");
      file.x.push_back(x);
      file.alpha.push_back(a);
    }
  }
  if (!have_omega) fail("missing 'omega'");
  if (expected < 0 || static_cast<int>(file.alpha.size()) != expected)
    fail("control count does not match the number of rows");
  return file;
}

void write_shape_file(const std::filesystem::path& path, const ShapeFile& file) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write shape file " + path.string());
  out << std::setprecision(17);
  out << "omega " << file.omega << "\n";
  out << "controls " << file.alpha.size() << "\n";
  for (std::size_t i = 0; i < file.alpha.size(); ++i) out << file.x[i] << " " << file.alpha[i] << "\n";
}

ShapeCandidate candidate_from_file(const ShapeFile& file) {
  const auto m = file.alpha.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double expected = static_cast<double>(i) / static_cast<double>(m - 1);
    if (std::abs(file.x[i] - expected) > 1e-9)
      throw std::runtime_error("shape file control abscissae must be uniform on [0, 1]");
  }
  return ShapeCandidate::spline(file.alpha);
}

}  // namespace slipflow
