#include "slipflow/four_field.hpp"

#include <cmath>
#include <stdexcept>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

void require_weak(const SlipProblem& problem) {
  if (problem.mode() != ImpermeabilityMode::Weak)
    throw std::invalid_argument("four-field solves need a weak-mode SlipProblem");
}

MultiplierSet multipliers_of(const SlipProblem& problem, const FlowState& flow, const SlipBound& g,
                             const Vector& phi) {
  return {flow.sigma_nu, flow.sigma_tau, slip_bounds(problem, g, phi)};
}

}  // namespace

FourFieldSolution solve_four_field_aux(const SlipProblem& weak, const SlipBound& g, const Vector& phi,
                                       const AuxOptions& opts) {
  require_weak(weak);
  FlowState flow = solve_aux(weak, g, phi, opts);
  MultiplierSet m = multipliers_of(weak, flow, g, phi);
  return {std::move(flow), std::move(m)};
}

FourFieldResult solve_four_field(const SlipProblem& weak, const SlipBound& g, const Vector& phi0,
                                 const FixedPointOptions& opts) {
  require_weak(weak);
  auto fp = fixed_point(weak, g, phi0, opts);
  FourFieldResult r;
  r.flow = std::move(fp.state);
  r.phi = std::move(fp.phi);
  r.history = std::move(fp.history);
  r.converged = fp.converged;
  const Vector own = r.flow.u_tau.cwiseAbs();
  r.multipliers = multipliers_of(weak, r.flow, g, own);
  r.multipliers.sigma_tau = r.multipliers.sigma_tau.cwiseMax(-r.multipliers.bound).cwiseMin(r.multipliers.bound);
  return r;
}

EquivalenceReport check_equivalence(const AssembledSystem& system, const FlowState& sol_p, const FlowState& flow_m,
                                    const MultiplierSet& multipliers_m) {
  if (sol_p.u.size() != flow_m.u.size() || sol_p.p.size() != flow_m.p.size() ||
      sol_p.sigma_tau.size() != multipliers_m.sigma_tau.size() || sol_p.u.size() != system.A.rows())
    throw SpaceMismatch("solutions were computed on different DOF layouts");
  EquivalenceReport r;
  r.velocity_h1 = h1_norm(system, sol_p.u - flow_m.u);
  r.pressure_l2 = pressure_l2(system, sol_p.p - flow_m.p);
  r.sigma_tau_max = (sol_p.sigma_tau - multipliers_m.sigma_tau).lpNorm<Eigen::Infinity>();
  return r;
}

Vector recover_normal_stress(const FemSpace& space, const FlowState& flow) {
  const auto& mesh = space.mesh;
  const int ns = space.slip_count();
  Vector sum = Vector::Zero(ns), count = Vector::Zero(ns);
  std::array<double, 6> phi;
  std::array<Vec2, 6> dphi;
  for (int e = 0; e < mesh.nx; ++e) {
    // The triangle (v00, v10, v11) of the bottom quad owns slip edge e.
    const int t = 2 * e;
    const auto& tri = mesh.triangles[t];
    const std::array<Vec2, 3> p = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    const auto& cn = space.cell_nodes[t];
    const std::array<std::array<double, 3>, 3> at = {{{1, 0, 0}, {0.5, 0.5, 0}, {0, 1, 0}}};
    for (int k = 0; k < 3; ++k) {
      const int j = 2 * e + k;
      const auto& sn = space.slip_nodes[j];
      if (sn.corner) continue;
      p2_basis(p, at[k], phi, dphi);
      Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(c, d) = d u_c / d x_d
      double pressure = 0.0;
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 2; ++c) grad.row(c) += flow.u[space.velocity_dof(c, cn[i])] * dphi[i].transpose();
      for (int v = 0; v < 3; ++v) pressure += at[k][v] * flow.p[tri[v]];
      sum[j] += -pressure + sn.normal.dot(grad * sn.normal);
      count[j] += 1.0;
    }
  }
  for (int j = 0; j < ns; ++j)
    if (count[j] > 0.0) sum[j] /= count[j];
  return sum;
}

double normal_pairing(const FemSpace& space, const AssembledSystem& system, const Vector& sigma_nu,
                      const BodyForce& v) {
  double s = 0.0;
  for (int j : space.active_slip) {
    const auto& sn = space.slip_nodes[j];
    s += system.W[j] * sigma_nu[j] * v(space.nodes[sn.node]).dot(sn.normal);
  }
  return s;
}

double tangential_pairing(const FemSpace& space, const AssembledSystem& system, const Vector& sigma_tau,
                          const BodyForce& v) {
  double s = 0.0;
  for (int j : space.active_slip) {
    const auto& sn = space.slip_nodes[j];
    s += system.W[j] * sigma_tau[j] * v(space.nodes[sn.node]).dot(sn.tangent);
  }
  return s;
}

}  // namespace slipflow
