#pragma once

#include <vector>

#include "slipflow/slip_solver.hpp"

namespace slipflow {

/// Boundary multipliers at the slip nodes (corners zero).
struct MultiplierSet {
  Vector sigma_nu;   // normal stress, multiplier of the impermeability constraint
  Vector sigma_tau;  // shear stress, |sigma_tau| <= bound
  Vector bound;      // g(phi)
};

struct FourFieldSolution {
  FlowState flow;
  MultiplierSet multipliers;
};

/// Four-field auxiliary problem on a weak-mode SlipProblem: the normal trace
/// enters through an equality multiplier, the shear stress through the same
/// clamped Uzawa iteration as the velocity-pressure solver.
FourFieldSolution solve_four_field_aux(const SlipProblem& weak, const SlipBound& g, const Vector& phi,
                                       const AuxOptions& opts = {});

struct FourFieldResult {
  FlowState flow;
  MultiplierSet multipliers;
  Vector phi;
  std::vector<HistoryRow> history;
  bool converged = false;
};

/// Fixed point over phi with the four-field auxiliary solve. On return the
/// bound is g(|u_tau|) of the returned flow and sigma_tau is clamped to it.
FourFieldResult solve_four_field(const SlipProblem& weak, const SlipBound& g, const Vector& phi0,
                                 const FixedPointOptions& opts = {});

struct EquivalenceReport {
  double velocity_h1 = 0.0;    // ||u_P - u_M||_1
  double pressure_l2 = 0.0;    // ||p_P - p_M||_0
  double sigma_tau_max = 0.0;  // max |sigma_P - sigma_M| at slip nodes
};

/// Compares a velocity-pressure solution with a four-field one computed on
/// the same space. Throws SpaceMismatch when the layouts differ.
EquivalenceReport check_equivalence(const AssembledSystem& system, const FlowState& sol_p,
                                    const FlowState& flow_m, const MultiplierSet& multipliers_m);

/// -p + (du/dnu).nu at the slip nodes, from the gradient of the discrete
/// velocity in the triangles adjacent to the slip boundary.
Vector recover_normal_stress(const FemSpace& space, const FlowState& flow);

/// Lumped boundary pairings of the multipliers with a smooth field v.
double normal_pairing(const FemSpace& space, const AssembledSystem& system, const Vector& sigma_nu,
                      const BodyForce& v);
double tangential_pairing(const FemSpace& space, const AssembledSystem& system, const Vector& sigma_tau,
                          const BodyForce& v);

}  // namespace slipflow
