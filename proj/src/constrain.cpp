#include "slipflow/constrain.hpp"

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {
using Triplets = std::vector<Eigen::Triplet<double>>;

void append_block(Triplets& out, const SparseMatrix& m, int row0, int col0, double scale, bool transpose) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const int r = transpose ? it.col() : it.row();
      const int c = transpose ? it.row() : it.col();
      out.emplace_back(row0 + r, col0 + c, scale * it.value());
    }
}
}  // namespace

ConstrainedSystem::ConstrainedSystem(const FemSpace& space, const AssembledSystem& system, ImpermeabilityMode mode,
                                     bool factorize)
    : mode_(mode), load_(system.F), n_p_(space.pressure_dofs()), n_slip_(space.slip_count()) {
  traction_ = SparseMatrix(system.T.transpose()) * system.W.asDiagonal();
  trace_ = system.T;

  // Expansion from reduced to full velocity DOFs.
  std::vector<int> slip_of_node(space.n_p2, -1);
  for (int j = 0; j < space.slip_count(); ++j) slip_of_node[space.slip_nodes[j].node] = j;

  Triplets tq;
  int col = 0;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < space.n_p2; ++k) {
      if (space.on_gamma[k]) continue;
      if (space.on_slip[k] && mode == ImpermeabilityMode::NoSlip) continue;
      if (space.on_slip[k] && mode == ImpermeabilityMode::Strong) continue;  // handled below
      tq.emplace_back(space.velocity_dof(c, k), col++, 1.0);
    }
  }
  if (mode == ImpermeabilityMode::Strong) {
    for (int j : space.active_slip) {
      const auto& sn = space.slip_nodes[j];
      tq.emplace_back(space.velocity_dof(0, sn.node), col, sn.tangent.x());
      tq.emplace_back(space.velocity_dof(1, sn.node), col, sn.tangent.y());
      ++col;
    }
  }
  Q_.resize(space.velocity_dofs(), col);
  Q_.setFromTriplets(tq.begin(), tq.end());

  A_r_ = SparseMatrix(Q_.transpose() * system.A * Q_);
  B_r_ = system.B * Q_;

  if (mode == ImpermeabilityMode::Weak) multiplier_nodes_ = space.active_slip;
  n_mult_ = static_cast<int>(multiplier_nodes_.size());

  const int nr = reduced_velocity_dofs();
  const int p0 = nr, s0 = nr + n_p_, l0 = nr + n_p_ + n_mult_;
  const int n = l0 + 1;

  Triplets tk;
  append_block(tk, A_r_, 0, 0, 1.0, false);
  append_block(tk, B_r_, 0, p0, -1.0, true);
  append_block(tk, B_r_, p0, 0, -1.0, false);
  if (n_mult_ > 0) {
    Triplets tw;
    for (int r = 0; r < n_mult_; ++r) {
      const int j = multiplier_nodes_[r];
      const auto& sn = space.slip_nodes[j];
      for (int c = 0; c < 2; ++c) tw.emplace_back(r, space.velocity_dof(c, sn.node), system.W[j] * sn.normal[c]);
    }
    SparseMatrix WN(n_mult_, space.velocity_dofs());
    WN.setFromTriplets(tw.begin(), tw.end());
    const SparseMatrix WN_r = WN * Q_;
    append_block(tk, WN_r, 0, s0, -1.0, true);
    append_block(tk, WN_r, s0, 0, -1.0, false);
  }
  for (int k = 0; k < n_p_; ++k) {
    tk.emplace_back(p0 + k, l0, -system.pressure_mean[k]);
    tk.emplace_back(l0, p0 + k, -system.pressure_mean[k]);
  }
  saddle_.resize(n, n);
  saddle_.setFromTriplets(tk.begin(), tk.end());
  saddle_.makeCompressed();

  if (!factorize) return;
  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu_->analyzePattern(saddle_);
  lu_->factorize(saddle_);
  if (lu_->info() != Eigen::Success) throw SingularSaddle("saddle-point factorization failed: " + lu_->lastErrorMessage());
}

LinearSolution ConstrainedSystem::solve(const Vector& velocity_load) const {
  return unpack(solve_raw(*lu_, velocity_load));
}

LinearSolution ConstrainedSystem::solve_with_slip_stiffness(const Vector& d, const Vector& velocity_load) const {
  const SparseMatrix TQ = trace_ * Q_;
  const SparseMatrix extra = SparseMatrix(TQ.transpose()) * d.asDiagonal() * TQ;
  SparseMatrix k = saddle_;
  SparseMatrix padded(size(), size());
  Triplets te;
  append_block(te, extra, 0, 0, 1.0, false);
  padded.setFromTriplets(te.begin(), te.end());
  k += padded;
  k.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(k);
  lu.factorize(k);
  if (lu.info() != Eigen::Success) throw SingularSaddle("modified saddle-point factorization failed");
  return unpack(solve_raw(lu, velocity_load));
}

Vector ConstrainedSystem::solve_raw(const Eigen::SparseLU<SparseMatrix>& lu, const Vector& velocity_load) const {
  Vector rhs = Vector::Zero(size());
  rhs.head(reduced_velocity_dofs()) = Q_.transpose() * velocity_load;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SingularSaddle("saddle-point back-substitution failed");
  return x;
}

LinearSolution ConstrainedSystem::unpack(const Vector& x) const {
  const int nr = reduced_velocity_dofs();

  LinearSolution sol;
  sol.u = Q_ * x.head(nr);
  sol.p = x.segment(nr, n_p_);
  sol.sigma_nu = Vector::Zero(n_slip_);
  for (int r = 0; r < n_mult_; ++r) sol.sigma_nu[multiplier_nodes_[r]] = x[nr + n_p_ + r];
  sol.mean_multiplier = x[size() - 1];
  return sol;
}

Vector ConstrainedSystem::traction_load(const Vector& sigma_tau) const { return load_ + traction_ * sigma_tau; }

ConstrainedSystem constrain(const FemSpace& space, const AssembledSystem& system, ImpermeabilityMode mode) {
  return ConstrainedSystem(space, system, mode);
}

LinearSolution solve_noslip_stokes(const FemSpace& space, const AssembledSystem& system) {
  return ConstrainedSystem(space, system, ImpermeabilityMode::NoSlip).solve(system.F);
}

}  // namespace slipflow
