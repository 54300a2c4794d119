#pragma once

#include <memory>

#include <Eigen/SparseLU>

#include "slipflow/fem.hpp"

namespace slipflow {

enum class ImpermeabilityMode {
  Strong,  // slip-node velocities rotated to (normal, tangent), normal part eliminated
  Weak,    // only no-slip DOFs eliminated; normal trace kept as a multiplier block
  NoSlip,  // Dirichlet on the whole boundary
};

/// Solution of one linear saddle-point solve, mapped back to full vectors.
struct LinearSolution {
  Vector u;          // full velocity DOF vector
  Vector p;          // pressure, zero mean
  Vector sigma_nu;   // normal multiplier per slip node (weak mode; zero elsewhere)
  double mean_multiplier = 0.0;
};

/// Reduced operators and a factorized saddle-point matrix for one mode.
///
/// Unknown ordering: reduced velocity, pressure, normal multipliers at active
/// slip nodes (weak mode only), one multiplier for the pressure mean.
/// Immutable after construction; copies share the factorization.
class ConstrainedSystem {
 public:
  /// With `factorize == false` only the reduced operators are formed and the
  /// solve methods must not be called.
  ConstrainedSystem(const FemSpace& space, const AssembledSystem& system, ImpermeabilityMode mode,
                    bool factorize = true);

  ImpermeabilityMode mode() const { return mode_; }
  int reduced_velocity_dofs() const { return static_cast<int>(Q_.cols()); }
  int normal_multipliers() const { return n_mult_; }
  int size() const { return static_cast<int>(saddle_.rows()); }

  /// Full-from-reduced velocity map.
  const SparseMatrix& expansion() const { return Q_; }
  const SparseMatrix& reduced_stiffness() const { return A_r_; }
  const SparseMatrix& reduced_divergence() const { return B_r_; }
  const SparseMatrix& saddle_matrix() const { return saddle_; }

  Vector expand(const Vector& reduced) const { return Q_ * reduced; }

  /// Solves with right-hand side `velocity_load` (full velocity numbering).
  LinearSolution solve(const Vector& velocity_load) const;

  /// Solves the system whose velocity block is augmented by T^T diag(d) T,
  /// d given per slip node. Factorizes a fresh matrix on every call.
  LinearSolution solve_with_slip_stiffness(const Vector& d, const Vector& velocity_load) const;

  /// Load F + T^T W sigma_tau for a slip-node traction vector.
  Vector traction_load(const Vector& sigma_tau) const;

 private:
  Vector solve_raw(const Eigen::SparseLU<SparseMatrix>& lu, const Vector& velocity_load) const;
  LinearSolution unpack(const Vector& x) const;

  ImpermeabilityMode mode_;
  Vector load_;           // F
  SparseMatrix traction_;  // T^T W
  SparseMatrix trace_;     // T
  std::vector<int> multiplier_nodes_;  // slip-node index per normal multiplier
  int n_p_ = 0;
  int n_mult_ = 0;
  int n_slip_ = 0;
  SparseMatrix Q_, A_r_, B_r_, saddle_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
};

ConstrainedSystem constrain(const FemSpace& space, const AssembledSystem& system, ImpermeabilityMode mode);

/// Stokes velocity and pressure with no-slip on the whole boundary.
LinearSolution solve_noslip_stokes(const FemSpace& space, const AssembledSystem& system);

}  // namespace slipflow
