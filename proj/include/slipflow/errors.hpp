#pragma once

#include <stdexcept>
#include <string>

namespace slipflow {

/// A boundary function failed one of the admissible-set bounds.
class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(std::string which, double x1, double value);

  const std::string& which() const { return which_; }
  double x1() const { return x1_; }
  double value() const { return value_; }

 private:
  std::string which_;
  double x1_;
  double value_;
};

class DegenerateCell : public std::runtime_error {
 public:
  DegenerateCell(int triangle, double area);
  int triangle() const { return triangle_; }

 private:
  int triangle_;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, int iterations, double residual);
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class NonPositivePhi : public std::runtime_error {
 public:
  NonPositivePhi(int node, double value);
};

class SingularSaddle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpaceMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleStart : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slipflow
