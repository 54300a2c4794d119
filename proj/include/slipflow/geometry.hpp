#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "slipflow/spline.hpp"

namespace slipflow {

using Vec2 = Eigen::Vector2d;

/// Bounds defining the admissible boundary functions and the channel height.
struct AdmissibleSetParams {
  double alpha_min = 0.1;
  double alpha_max = 0.9;
  double c1 = 2.0;   // bound on |alpha'|
  double c2 = 10.0;  // bound on |alpha''|
  double omega = 1.5;

  /// Throws std::invalid_argument unless 0 < alpha_min < alpha_max < omega and c1, c2 > 0.
  void validate() const;

  bool operator==(const AdmissibleSetParams&) const = default;
};

/// An unchecked boundary function alpha on [0, 1] with two derivatives.
///
/// Either a closed-form callable triple or a clamped cubic spline through
/// uniform control values.
class ShapeCandidate {
 public:
  using Fn = std::function<double(double)>;

  ShapeCandidate(Fn value, Fn slope, Fn curvature, std::vector<double> breakpoints = {});

  static ShapeCandidate constant(double alpha);
  static ShapeCandidate sine(double mean, double amplitude, double frequency = 1.0);
  static ShapeCandidate spline(std::span<const double> controls);

  double value(double x1) const { return value_(x1); }
  double slope(double x1) const { return slope_(x1); }
  double curvature(double x1) const { return curvature_(x1); }

  /// Interior points where the second derivative may jump (spline knots).
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Control values when spline-backed.
  const std::optional<std::vector<double>>& controls() const { return controls_; }

  /// this + delta * direction.
  ShapeCandidate plus(const ShapeCandidate& direction, double delta) const;

 private:
  Fn value_, slope_, curvature_;
  std::vector<double> breakpoints_;
  std::optional<std::vector<double>> controls_;
};

/// A boundary function that passed the admissible-set checks, bundled with
/// the parameters it was checked against.
class BoundaryShape {
 public:
  double alpha(double x1) const { return curve_.value(x1); }
  double slope(double x1) const { return curve_.slope(x1); }
  double curvature(double x1) const { return curve_.curvature(x1); }
  double omega() const { return params_.omega; }
  const AdmissibleSetParams& params() const { return params_; }
  const ShapeCandidate& curve() const { return curve_; }

 private:
  BoundaryShape(ShapeCandidate curve, AdmissibleSetParams params)
      : curve_(std::move(curve)), params_(params) {}
  friend BoundaryShape validate_shape(const ShapeCandidate&, const AdmissibleSetParams&, int);

  ShapeCandidate curve_;
  AdmissibleSetParams params_;
};

inline constexpr int kDefaultCheckGrid = 1000;

/// Checks value and derivative bounds on a uniform grid of `grid_intervals`
/// intervals plus the candidate's breakpoints, in increasing x1.
/// Throws ConstraintViolation describing the first failure.
BoundaryShape validate_shape(const ShapeCandidate& candidate, const AdmissibleSetParams& params,
                             int grid_intervals = kDefaultCheckGrid);

struct BoundaryFrame {
  Vec2 normal;   // outward, i.e. pointing below the graph
  Vec2 tangent;  // (1, alpha') normalized
  double weight; // sqrt(1 + alpha'^2)
};

BoundaryFrame boundary_frame(const BoundaryShape& shape, double x1);
BoundaryFrame frame_from_slope(double slope);

/// C1 distance max|a - b| + max|a' - b'|, maxima over the check grid.
double c1_distance(const BoundaryShape& a, const BoundaryShape& b, int grid_intervals = kDefaultCheckGrid);

/// Shape file: `omega <value>`, `controls <m>`, then m lines `x alpha`.
struct ShapeFile {
  double omega = 1.5;
  std::vector<double> x;
  std::vector<double> alpha;
};

ShapeFile read_shape_file(const std::filesystem::path& path);
void write_shape_file(const std::filesystem::path& path, const ShapeFile& file);

/// Spline candidate through the file's control values (which must be uniform on [0, 1]).
ShapeCandidate candidate_from_file(const ShapeFile& file);

}  // namespace slipflow
