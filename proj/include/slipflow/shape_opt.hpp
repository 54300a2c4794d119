#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slipflow/four_field.hpp"
#include "slipflow/geometry.hpp"
#include "slipflow/slip_solver.hpp"

namespace slipflow {

/// Piecewise-linear profile over x1, constant beyond the end abscissae.
struct TargetProfile {
  std::vector<double> x;
  std::vector<double> y;

  double operator()(double x1) const;
  bool empty() const { return x.empty(); }
  /// Checks sorted abscissae, matching sizes and finite data.
  void validate() const;
};

struct CostSpec {
  enum class Kind { Dissipation, StressTracking, TraceTracking };
  Kind kind = Kind::Dissipation;
  TargetProfile target;  // sigma_d or u_d for the tracking kinds
  double weight = 1.0;

  void validate() const;
};

enum class Formulation { P, M };

/// Everything besides the shape that defines one state solve.
struct SolverConfig {
  Formulation formulation = Formulation::P;
  int nx = 16;
  int ny = 16;
  BodyForce force;
  SlipBound bound = SlipBound::constant(1.0);
  FixedPointOptions fixed_point;
  double phi0 = 0.0;  // constant initial guess
};

BoundaryShape shape_from_controls(std::span<const double> controls, const AdmissibleSetParams& params);

struct Evaluation {
  bool feasible = false;
  double J = std::numeric_limits<double>::infinity();
  FlowState state;
  std::optional<MultiplierSet> multipliers;  // formulation M only
  std::vector<HistoryRow> history;
  std::string failure;  // reason when infeasible
};

/// Solves the state problem on a (nx, ny) mesh of `shape` and evaluates the
/// cost. Solver failures, including a fixed point that does not converge,
/// give an infeasible evaluation with J = +inf.
Evaluation evaluate_cost(const BoundaryShape& shape, const CostSpec& cost, const SolverConfig& solver);

struct OptimizeOptions {
  std::vector<double> initial;
  double step0 = 0.05;
  double shrink = 0.5;
  int budget = 200;  // probe evaluations, the initial point not included
  double min_step = 1e-4;
  int threads = 1;
};

struct OptEval {
  int id = 0;
  std::vector<double> controls;
  bool feasible = false;
  double J = std::numeric_limits<double>::infinity();
  std::vector<HistoryRow> history;
};

struct OptRun {
  std::vector<OptEval> evaluations;  // id 0 is the initial point
  std::vector<double> best_so_far;   // best J after each evaluation
  std::vector<double> step_trace;    // step used by each poll
  std::vector<double> best_controls;
  double best_J = std::numeric_limits<double>::infinity();
  std::string stop_reason;  // "budget" or "step"
};

/// Compass search over spline controls. Each poll evaluates the probes
/// c +- step e_i (clipped to [alpha_min, alpha_max]) in the order
/// +e_0, -e_0, +e_1, ...; the best strictly improving probe is accepted,
/// ties going to the earlier probe, otherwise the step shrinks. Probes of
/// one poll may run on up to `threads` workers; the result does not depend
/// on the thread count. Throws InfeasibleStart.
OptRun optimize(const CostSpec& cost, const AdmissibleSetParams& params, const SolverConfig& solver,
                const OptimizeOptions& opts);

inline constexpr int kPairingFields = 5;

/// Smooth test fields used for the boundary pairings.
BodyForce pairing_field(int index);

struct StabilityRow {
  double delta = 0.0;
  double e_u = 0.0;  // H1 norm of the velocity difference, reference operators
  double e_p = 0.0;  // L2 norm of the pressure difference
  double relative_e_u = 0.0;
  std::array<double, kPairingFields> nu_diff{};   // formulation M only
  std::array<double, kPairingFields> tau_diff{};
};

/// Solves on alpha + delta * beta for each delta and compares with delta = 0
/// node by node: all meshes are images of one reference grid, so DOFs with
/// equal indices sit at equal reference coordinates.
std::vector<StabilityRow> stability_experiment(const ShapeCandidate& base, const ShapeCandidate& direction,
                                               std::span<const double> deltas, const AdmissibleSetParams& params,
                                               const SolverConfig& solver);

}  // namespace slipflow
