#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slipflow/shape_opt.hpp"

namespace slipflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

class UnknownKey : public ConfigError {
 public:
  UnknownKey(const std::string& key, int line);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

class InvalidValue : public ConfigError {
 public:
  InvalidValue(const std::string& key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Task { SolveP, SolveM, FixedPointP, FixedPointM, Optimize, Stability, ConvergenceStudy };

std::string_view to_string(Task task);

/// Resolved run description. Every field has a default; string-valued kinds
/// are checked against their allowed values by validate().
struct RunConfig {
  Task task = Task::SolveP;

  std::string shape = "constant";  // constant | sine | spline | file
  double alpha = 0.5;
  double sine_mean = 0.5;
  double sine_amplitude = 0.05;
  double sine_frequency = 1.0;
  std::vector<double> controls;  // spline shape, optimizer start
  std::string shape_file;

  double omega = 1.5;
  double alpha_min = 0.1;
  double alpha_max = 0.9;
  double c1 = 2.0;
  double c2 = 10.0;

  int n_x = 16;
  int n_y = 16;

  std::string force = "constant";  // constant | shear | vortex
  std::vector<double> force_vector{0.0, 0.0};
  double force_amplitude = 1.0;

  std::string slip_bound = "constant";  // constant | linear_saturating | weakening
  double g0 = 1.0;
  double lipschitz = 0.0;
  double t_max = 1.0;
  double phi0 = 0.0;

  std::string aux_method = "uzawa";  // uzawa | smoothed_newton
  double tol_uz = 1e-10;
  int max_uzawa = 5000;
  double tol_fp = 1e-8;
  int max_fp = 200;
  double damping = 0.5;

  std::string formulation = "p";     // p | m, for optimize and stability
  std::string cost = "dissipation";  // dissipation | stress_tracking | trace_tracking
  double cost_weight = 1.0;
  std::vector<double> target_x;
  std::vector<double> target_y;
  double step0 = 0.05;
  double shrink = 0.5;
  int budget = 200;
  double min_step = 1e-4;

  std::string direction = "sine";  // sine | spline
  double direction_amplitude = 0.05;
  double direction_frequency = 1.0;
  std::vector<double> direction_controls;
  std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};

  std::vector<int> levels{8, 16, 32, 64};

  std::string output_dir = "out";
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;

  /// Throws InvalidValue naming the offending key.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment, list values are
/// comma separated. Omitted keys keep their defaults; `task` is required.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in a form parse_config accepts.
std::string to_text(const RunConfig& config);

// Model objects described by a config.
AdmissibleSetParams admissible_params(const RunConfig& config);
ShapeCandidate shape_candidate(const RunConfig& config);
BodyForce body_force(const RunConfig& config);
SlipBound slip_bound(const RunConfig& config);
FixedPointOptions fixed_point_options(const RunConfig& config);
SolverConfig solver_config(const RunConfig& config);
CostSpec cost_spec(const RunConfig& config);

}  // namespace slipflow
