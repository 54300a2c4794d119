#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "slipflow/constrain.hpp"
#include "slipflow/fem.hpp"
#include "slipflow/slip_bound.hpp"

namespace slipflow {

enum class AuxMethod {
  Uzawa,           // projected dual ascent on the tangential traction (default)
  SmoothedNewton,  // |t| ~ sqrt(t^2 + eps^2) with an eps cascade; cross-check only
};

struct AuxOptions {
  AuxMethod method = AuxMethod::Uzawa;
  double tol = 1e-10;
  int max_iterations = 5000;
  double rho = 0.0;  // <= 0 selects 1 / c_hat^2
  bool record_gap_trace = false;
  double smoothing_final = 1e-12;  // last eps of the Newton cascade
  /// After this many Uzawa steps with an unchanged clamp pattern, try the
  /// exact solve for that pattern; 0 disables.
  int polish_after = 20;
};

/// Discrete velocity/pressure and slip-boundary traces. Slip-node vectors
/// are indexed like FemSpace::slip_nodes; corner entries are zero.
struct FlowState {
  Vector u;
  Vector p;
  Vector u_tau;
  Vector sigma_tau;
  Vector sigma_nu;  // only filled by the weak (four-field) formulation
  int iterations = 0;
  double rho = 0.0;
  std::vector<double> gap_trace;
};

/// Auxiliary problem data for one space, one load and one impermeability mode.
///
/// Holds the factorized saddle system together with the dense tangential
/// response at the active slip nodes: u_tau = base + H sigma_tau. Each Uzawa
/// step is a linear solve whose slip trace is read off this response, so the
/// iteration never refactorizes. Immutable after construction.
class SlipProblem {
 public:
  SlipProblem(FemSpace space, AssembledSystem system, ImpermeabilityMode mode = ImpermeabilityMode::Strong);

  const FemSpace& space() const { return *space_; }
  const AssembledSystem& system() const { return *system_; }
  const ConstrainedSystem& constrained() const { return *constrained_; }
  ImpermeabilityMode mode() const { return constrained_->mode(); }

  /// Trace constant of the strong-mode velocity space (see estimate_trace_norm).
  double trace_constant() const { return trace_constant_; }
  const Eigen::MatrixXd& response() const { return response_; }
  const Vector& base_trace() const { return base_trace_; }

 private:
  std::shared_ptr<const FemSpace> space_;
  std::shared_ptr<const AssembledSystem> system_;
  std::shared_ptr<const ConstrainedSystem> constrained_;
  double trace_constant_ = 0.0;
  Eigen::MatrixXd response_;
  Vector base_trace_;
};

/// Solves the auxiliary variational inequality with slip bound g(phi).
/// Throws NonPositivePhi for negative phi and NoConvergence when the
/// iteration budget runs out.
FlowState solve_aux(const SlipProblem& problem, const SlipBound& g, const Vector& phi, const AuxOptions& opts = {},
                    const Vector* warm_start = nullptr);

/// |u_tau| at the slip nodes of the auxiliary solution.
Vector psi(const SlipProblem& problem, const SlipBound& g, const Vector& phi, const AuxOptions& opts = {});

struct ViResidual {
  double bound_violation = 0.0;      // max(0, |sigma| - g)
  double complementarity_gap = 0.0;  // sum W (sigma u_tau + g |u_tau|)
  double saturation_defect = 0.0;    // max of g - |sigma| where |u_tau| > threshold
};

ViResidual vi_residual(const SlipProblem& problem, const FlowState& state, const SlipBound& g, const Vector& phi,
                       double active_threshold = 1e-9);

/// Residual of the momentum equation a(u,v) - b(v,p) - <sigma_nu, v_nu> -
/// (sigma_tau, v_tau) - (f,v), tested against `samples` random admissible v
/// (standard normal in the reduced coordinates). Returns the largest
/// |residual(v)| / |v|, relative to 1 + |F| + |T^T W sigma_tau|.
double saddle_residual(const SlipProblem& problem, const FlowState& state, int samples, std::uint64_t seed);

/// a(u,u)/2 - (f,u) + j(phi, u_tau) with the lumped boundary rule.
double energy(const SlipProblem& problem, const FlowState& state, const SlipBound& g, const Vector& phi);

/// c_hat = sqrt of the largest eigenvalue of T^T W T x = lambda A x on the
/// strong-mode velocity space, by power iteration.
double estimate_trace_norm(const FemSpace& space, const AssembledSystem& system, const ConstrainedSystem& strong,
                           double tol = 1e-8, int max_iterations = 500);

struct HistoryRow {
  int k = 0;
  double fp_diff = 0.0;  // ||phi_{k+1} - phi_k|| in L2(S)
  int uzawa_iters = 0;
  double energy = 0.0;
};

struct FixedPointOptions {
  double tol = 1e-8;
  int max_it = 200;
  double damping = 0.5;  // used only when c_hat^2 L >= 1
  bool warm_start = true;
  AuxOptions inner;
};

struct FixedPointResult {
  FlowState state;
  Vector phi;  // last iterate fed to the auxiliary solve
  std::vector<HistoryRow> history;
  bool converged = false;
  bool damped = false;
  double contraction_bound = 0.0;  // c_hat^2 L
};

/// Successive approximations phi_{k+1} = Psi(phi_k), damped when the
/// Lipschitz estimate does not guarantee contraction. Non-convergence is
/// reported through `converged`, not thrown.
FixedPointResult fixed_point(const SlipProblem& problem, const SlipBound& g, const Vector& phi0,
                             const FixedPointOptions& opts = {});

/// Bound vector g(phi) with corners zeroed.
Vector slip_bounds(const SlipProblem& problem, const SlipBound& g, const Vector& phi);

}  // namespace slipflow
