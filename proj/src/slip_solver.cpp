#include "slipflow/slip_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

void check_phi(const Vector& phi, int expected) {
  if (phi.size() != expected) throw std::invalid_argument("phi must have one value per slip node");
  for (int j = 0; j < phi.size(); ++j)
    if (!(phi[j] >= 0.0)) throw NonPositivePhi(j, phi[j]);
}

// Active-node gather/scatter between full slip vectors and the response index set.
Vector gather(const std::vector<int>& active, const Vector& full) {
  Vector out(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) out[a] = full[active[a]];
  return out;
}

Vector scatter(const std::vector<int>& active, const Vector& values, int size) {
  Vector out = Vector::Zero(size);
  for (std::size_t a = 0; a < active.size(); ++a) out[active[a]] = values[a];
  return out;
}

double gap_of(const Vector& W, const Vector& sigma, const Vector& ut, const Vector& bound) {
  double gap = 0.0;
  for (int a = 0; a < sigma.size(); ++a) gap += W[a] * (sigma[a] * ut[a] + bound[a] * std::abs(ut[a]));
  return gap;
}

FlowState finish(const SlipProblem& problem, const Vector& sigma_full) {
  const auto sol = problem.constrained().solve(problem.constrained().traction_load(sigma_full));
  FlowState state;
  state.u = sol.u;
  state.p = sol.p;
  state.u_tau = problem.system().T * sol.u;
  for (int j = 0; j < problem.space().slip_count(); ++j)
    if (problem.space().slip_nodes[j].corner) state.u_tau[j] = 0.0;
  state.sigma_tau = sigma_full;
  if (problem.mode() == ImpermeabilityMode::Weak) state.sigma_nu = sol.sigma_nu;
  return state;
}

// -1 / +1 where sigma sits on the lower / upper bound, 0 in between.
std::vector<signed char> clamp_pattern(const Vector& sigma, const Vector& bound) {
  std::vector<signed char> p(sigma.size());
  for (int a = 0; a < sigma.size(); ++a) p[a] = sigma[a] >= bound[a] ? 1 : (sigma[a] <= -bound[a] ? -1 : 0);
  return p;
}

// Solves for the traction that realizes a clamp pattern exactly: u_tau = 0
// on the unclamped nodes, sigma = +-g on the others. Accepts the result only
// if it satisfies the bounds, the sign conditions and the gap tolerance.
bool polish(const Eigen::MatrixXd& H, const Vector& base, const Vector& bound, const Vector& W,
            const std::vector<signed char>& pattern, double tol, Vector& sigma) {
  const int n = static_cast<int>(pattern.size());
  std::vector<int> free;
  sigma = Vector::Zero(n);
  for (int a = 0; a < n; ++a) {
    if (pattern[a] == 0)
      free.push_back(a);
    else
      sigma[a] = pattern[a] * bound[a];
  }
  if (!free.empty()) {
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd Hff(nf, nf);
    Vector rhs(nf);
    const Vector fixed = base + H * sigma;
    for (int r = 0; r < nf; ++r) {
      rhs[r] = -fixed[free[r]];
      for (int c = 0; c < nf; ++c) Hff(r, c) = H(free[r], free[c]);
    }
    const Vector sf = Hff.partialPivLu().solve(rhs);
    for (int r = 0; r < nf; ++r) sigma[free[r]] = sf[r];
  }
  const Vector ut = base + H * sigma;
  for (int a = 0; a < n; ++a) {
    if (std::abs(sigma[a]) > bound[a] * (1.0 + 1e-12)) return false;
    if (pattern[a] * ut[a] > tol) return false;
  }
  sigma = sigma.cwiseMax(-bound).cwiseMin(bound);
  return gap_of(W, sigma, base + H * sigma, bound) <= tol;
}

FlowState solve_uzawa(const SlipProblem& problem, const Vector& bound_full, const AuxOptions& opts,
                      const Vector* warm_start) {
  const auto& space = problem.space();
  const auto& active = space.active_slip;
  const int na = static_cast<int>(active.size());
  const Vector bound = gather(active, bound_full);
  const Vector W = gather(active, problem.system().W);
  Vector arc(na);
  for (int a = 0; a < na; ++a) arc[a] = space.slip_nodes[active[a]].arc_weight;

  double rho = opts.rho > 0.0 ? opts.rho : 1.0 / (problem.trace_constant() * problem.trace_constant());
  const auto& H = problem.response();
  const auto& base = problem.base_trace();

  Vector sigma = Vector::Zero(na);
  if (warm_start) sigma = gather(active, *warm_start).cwiseMax(-bound).cwiseMin(bound);
  Vector ut = base + H * sigma;

  FlowState state;
  double prev_gap = gap_of(W, sigma, ut, bound);
  int increases = 0;
  double step = 0.0, gap = prev_gap;
  int it = 0;
  bool converged = false;
  std::vector<signed char> last_pattern;
  int stable = 0;
  while (it < opts.max_iterations) {
    ++it;
    const Vector next = (sigma - rho * ut).cwiseMax(-bound).cwiseMin(bound);
    step = (arc.array() * (next - sigma).array().abs()).maxCoeff();
    sigma = next;
    ut = base + H * sigma;
    gap = gap_of(W, sigma, ut, bound);
    if (opts.record_gap_trace) state.gap_trace.push_back(gap);
    if (step <= opts.tol && gap <= opts.tol) {
      converged = true;
      break;
    }
    if (opts.polish_after > 0) {
      const auto pattern = clamp_pattern(sigma, bound);
      stable = pattern == last_pattern ? stable + 1 : 0;
      last_pattern = pattern;
      if (stable == opts.polish_after) {
        stable = 0;
        Vector exact;
        if (polish(H, base, bound, W, pattern, opts.tol, exact)) {
          sigma = std::move(exact);
          ut = base + H * sigma;
          gap = gap_of(W, sigma, ut, bound);
          if (opts.record_gap_trace) state.gap_trace.push_back(gap);
          converged = true;
          break;
        }
      }
    }
    if (gap > prev_gap) {
      if (++increases >= 2) {
        rho *= 0.5;
        increases = 0;
      }
    } else {
      increases = 0;
    }
    prev_gap = gap;
  }
  if (na == 0) converged = true;
  if (!converged) throw NoConvergence("uzawa", it, std::max(step, gap));

  auto trace = std::move(state.gap_trace);
  state = finish(problem, scatter(active, sigma, space.slip_count()));
  state.iterations = it;
  state.rho = rho;
  state.gap_trace = std::move(trace);
  return state;
}

double smoothed_objective(const SlipProblem& problem, const Vector& u, const Vector& bound, double eps) {
  const auto& sys = problem.system();
  const Vector t = sys.T * u;
  double j = 0.0;
  for (int a : problem.space().active_slip) j += sys.W[a] * bound[a] * std::sqrt(t[a] * t[a] + eps * eps);
  return 0.5 * u.dot(sys.A * u) - sys.F.dot(u) + j;
}

FlowState solve_smoothed_newton(const SlipProblem& problem, const Vector& bound, const AuxOptions& opts) {
  const auto& sys = problem.system();
  const auto& space = problem.space();
  const int ns = space.slip_count();
  const auto& cs = problem.constrained();

  LinearSolution sol = cs.solve(sys.F);
  Vector u = sol.u;
  int total = 0;
  double eps = 1e-2;
  Vector d = Vector::Zero(ns), q = Vector::Zero(ns), t;
  while (true) {
    bool level_done = false;
    for (int it = 0; it < 100 && !level_done; ++it) {
      ++total;
      t = sys.T * u;
      d.setZero();
      q.setZero();
      for (int a : space.active_slip) {
        const double r = std::sqrt(t[a] * t[a] + eps * eps);
        d[a] = sys.W[a] * bound[a] * eps * eps / (r * r * r);
        q[a] = sys.W[a] * bound[a] * t[a] / r;
      }
      const Vector load = sys.F - sys.T.transpose() * (q - d.cwiseProduct(t));
      LinearSolution trial = cs.solve_with_slip_stiffness(d, load);
      const Vector du = trial.u - u;
      const double f0 = smoothed_objective(problem, u, bound, eps);
      double s = 1.0;
      while (s > 1e-12 && smoothed_objective(problem, u + s * du, bound, eps) > f0 + 1e-14 * std::abs(f0)) s *= 0.5;
      const double change = s * du.lpNorm<Eigen::Infinity>();
      if (s == 1.0) {
        sol = std::move(trial);
        u = sol.u;
      } else {
        u += s * du;
      }
      level_done = s == 1.0 && change <= 1e-14 * std::max(1.0, u.lpNorm<Eigen::Infinity>());
    }
    if (!level_done && eps <= opts.smoothing_final) throw NoConvergence("smoothed newton", total, eps);
    if (eps <= opts.smoothing_final) break;
    eps = std::max(eps * 0.1, opts.smoothing_final);
  }

  t = sys.T * u;
  Vector sigma = Vector::Zero(ns);
  for (int a : space.active_slip) sigma[a] = -bound[a] * t[a] / std::sqrt(t[a] * t[a] + eps * eps);
  FlowState state;
  state.u = u;
  state.p = sol.p;
  state.u_tau = t;
  for (int j = 0; j < ns; ++j)
    if (space.slip_nodes[j].corner) state.u_tau[j] = 0.0;
  state.sigma_tau = sigma;
  if (problem.mode() == ImpermeabilityMode::Weak) state.sigma_nu = sol.sigma_nu;
  state.iterations = total;
  return state;
}

}  // namespace

SlipProblem::SlipProblem(FemSpace space, AssembledSystem system, ImpermeabilityMode mode)
    : space_(std::make_shared<const FemSpace>(std::move(space))),
      system_(std::make_shared<const AssembledSystem>(std::move(system))) {
  constrained_ = std::make_shared<const ConstrainedSystem>(*space_, *system_, mode);
  if (mode == ImpermeabilityMode::Strong) {
    trace_constant_ = estimate_trace_norm(*space_, *system_, *constrained_);
  } else {
    const ConstrainedSystem strong(*space_, *system_, ImpermeabilityMode::Strong, false);
    trace_constant_ = estimate_trace_norm(*space_, *system_, strong);
  }

  const auto& active = space_->active_slip;
  const int na = static_cast<int>(active.size());
  const auto base = constrained_->solve(system_->F);
  const Vector full_base = system_->T * base.u;
  base_trace_ = gather(active, full_base);

  response_.resize(na, na);
  const SparseMatrix Tt = system_->T.transpose();
  for (int b = 0; b < na; ++b) {
    const int j = active[b];
    const Vector load = Tt.col(j) * system_->W[j];
    const auto sol = constrained_->solve(load);
    const Vector tr = system_->T * sol.u;
    response_.col(b) = gather(active, tr);
  }
}

Vector slip_bounds(const SlipProblem& problem, const SlipBound& g, const Vector& phi) {
  Vector bound = g.apply(phi);
  for (int j = 0; j < bound.size(); ++j)
    if (problem.space().slip_nodes[j].corner) bound[j] = 0.0;
  return bound;
}

FlowState solve_aux(const SlipProblem& problem, const SlipBound& g, const Vector& phi, const AuxOptions& opts,
                    const Vector* warm_start) {
  check_phi(phi, problem.space().slip_count());
  const Vector bound = slip_bounds(problem, g, phi);
  if (opts.method == AuxMethod::SmoothedNewton) return solve_smoothed_newton(problem, bound, opts);
  return solve_uzawa(problem, bound, opts, warm_start);
}

Vector psi(const SlipProblem& problem, const SlipBound& g, const Vector& phi, const AuxOptions& opts) {
  return solve_aux(problem, g, phi, opts).u_tau.cwiseAbs();
}

ViResidual vi_residual(const SlipProblem& problem, const FlowState& state, const SlipBound& g, const Vector& phi,
                       double active_threshold) {
  const auto& sys = problem.system();
  ViResidual r;
  for (int j : problem.space().active_slip) {
    const double bound = g(phi[j]);
    const double s = state.sigma_tau[j], u = state.u_tau[j];
    r.bound_violation = std::max(r.bound_violation, std::abs(s) - bound);
    r.complementarity_gap += sys.W[j] * (s * u + bound * std::abs(u));
    if (std::abs(u) > active_threshold) r.saturation_defect = std::max(r.saturation_defect, bound - std::abs(s));
  }
  r.bound_violation = std::max(0.0, r.bound_violation);
  return r;
}

double saddle_residual(const SlipProblem& problem, const FlowState& state, int samples, std::uint64_t seed) {
  const auto& sys = problem.system();
  const auto& cs = problem.constrained();
  const Vector traction = sys.T.transpose() * sys.W.cwiseProduct(state.sigma_tau);
  Vector r = sys.A * state.u - sys.B.transpose() * state.p - sys.F - traction;
  if (state.sigma_nu.size() == sys.W.size()) r -= sys.N.transpose() * sys.W.cwiseProduct(state.sigma_nu);
  const Vector r_reduced = cs.expansion().transpose() * r;
  const double scale = 1.0 + sys.F.norm() + traction.norm();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  Vector v(r_reduced.size());
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < v.size(); ++i) v[i] = normal(rng);
    const double norm = cs.expand(v).norm();
    if (norm > 0.0) worst = std::max(worst, std::abs(v.dot(r_reduced)) / norm);
  }
  return worst / scale;
}

double energy(const SlipProblem& problem, const FlowState& state, const SlipBound& g, const Vector& phi) {
  const auto& sys = problem.system();
  double j = 0.0;
  for (int a : problem.space().active_slip) j += sys.W[a] * g(phi[a]) * std::abs(state.u_tau[a]);
  return 0.5 * state.u.dot(sys.A * state.u) - sys.F.dot(state.u) + j;
}

double estimate_trace_norm(const FemSpace& space, const AssembledSystem& system, const ConstrainedSystem& strong,
                           double tol, int max_iterations) {
  const auto& active = space.active_slip;
  if (active.empty()) return 0.0;
  const SparseMatrix TQ = system.T * strong.expansion();
  Vector w = Vector::Zero(space.slip_count());
  for (int j : active) w[j] = system.W[j];
  const SparseMatrix& A = strong.reduced_stiffness();

  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SingularSaddle("reduced stiffness is not positive definite");
  auto apply_m = [&](const Vector& x) -> Vector { return TQ.transpose() * w.cwiseProduct(TQ * x); };

  Vector x = ldlt.solve(TQ.transpose() * w);
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const double xa = std::sqrt(x.dot(A * x));
    if (!(xa > 0.0)) return 0.0;
    x /= xa;
    const Vector mx = apply_m(x);
    const double next = x.dot(mx);
    if (it > 0 && std::abs(next - lambda) <= tol * next) return std::sqrt(next);
    lambda = next;
    x = ldlt.solve(mx);
  }
  throw NoConvergence("trace-norm power iteration", max_iterations, lambda);
}

FixedPointResult fixed_point(const SlipProblem& problem, const SlipBound& g, const Vector& phi0,
                             const FixedPointOptions& opts) {
  check_phi(phi0, problem.space().slip_count());
  if (!(opts.tol > 0.0)) throw std::invalid_argument("fixed_point: tolerance must be positive");
  const auto& W = problem.system().W;
  auto norm = [&](const Vector& v) { return std::sqrt(v.cwiseProduct(v).dot(W)); };

  FixedPointResult result;
  const double c = problem.trace_constant();
  result.contraction_bound = c * c * g.lipschitz();
  result.damped = result.contraction_bound >= 1.0;

  Vector phi = phi0;
  Vector warm;
  for (int k = 0; k < opts.max_it; ++k) {
    FlowState state = solve_aux(problem, g, phi, opts.inner, opts.warm_start && k > 0 ? &warm : nullptr);
    Vector next = state.u_tau.cwiseAbs();
    if (result.damped) next = (1.0 - opts.damping) * phi + opts.damping * next;
    const double diff = norm(next - phi);
    result.history.push_back({k, diff, state.iterations, energy(problem, state, g, phi)});
    warm = state.sigma_tau;
    const bool done = diff <= opts.tol * (1.0 + norm(phi));
    result.state = std::move(state);
    result.phi = phi;
    if (done) {
      result.converged = true;
      break;
    }
    phi = std::move(next);
  }
  return result;
}

}  // namespace slipflow
