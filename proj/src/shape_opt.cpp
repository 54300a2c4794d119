#include "slipflow/shape_opt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "slipflow/errors.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

double TargetProfile::operator()(double x1) const {
  if (x.empty()) return 0.0;
  if (x1 <= x.front()) return y.front();
  if (x1 >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), x1);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double s = (x1 - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - s) * y[i - 1] + s * y[i];
}

void TargetProfile::validate() const {
  if (x.size() != y.size()) throw std::invalid_argument("target profile: x and y differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw std::invalid_argument("target profile: non-finite data");
    if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("target profile: abscissae must increase");
  }
}

void CostSpec::validate() const {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("cost weight must be finite and >= 0");
  target.validate();
  if (kind != Kind::Dissipation && target.empty())
    throw std::invalid_argument("tracking costs need a target profile");
}

BoundaryShape shape_from_controls(std::span<const double> controls, const AdmissibleSetParams& params) {
  if (controls.size() < 4) throw std::invalid_argument("shape_from_controls needs at least 4 controls");
  return validate_shape(ShapeCandidate::spline(controls), params);
}

namespace {

struct StateSolve {
  std::shared_ptr<SlipProblem> problem;
  FlowState state;
  std::optional<MultiplierSet> multipliers;
  std::vector<HistoryRow> history;
  bool converged = false;
};

StateSolve solve_state(const BoundaryShape& shape, const SolverConfig& solver) {
  if (!solver.force) throw std::invalid_argument("solver config has no body force");
  auto space = build_space(build_mesh(shape, solver.nx, solver.ny), shape);
  auto system = assemble(space, solver.force);
  const auto mode = solver.formulation == Formulation::M ? ImpermeabilityMode::Weak : ImpermeabilityMode::Strong;
  StateSolve out;
  out.problem = std::make_shared<SlipProblem>(std::move(space), std::move(system), mode);
  const Vector phi0 = Vector::Constant(out.problem->space().slip_count(), solver.phi0);
  if (solver.formulation == Formulation::M) {
    auto r = solve_four_field(*out.problem, solver.bound, phi0, solver.fixed_point);
    out.state = std::move(r.flow);
    out.multipliers = std::move(r.multipliers);
    out.history = std::move(r.history);
    out.converged = r.converged;
  } else {
    auto r = fixed_point(*out.problem, solver.bound, phi0, solver.fixed_point);
    out.state = std::move(r.state);
    out.history = std::move(r.history);
    out.converged = r.converged;
  }
  return out;
}

double weighted_misfit(const SlipProblem& problem, const Vector& values, const TargetProfile& target) {
  const auto& space = problem.space();
  const auto& W = problem.system().W;
  double sum = 0.0;
  for (int j : space.active_slip) {
    const double d = values[j] - target(space.slip_nodes[j].x1);
    sum += W[j] * d * d;
  }
  return sum;
}

}  // namespace

Evaluation evaluate_cost(const BoundaryShape& shape, const CostSpec& cost, const SolverConfig& solver) {
  cost.validate();
  if (cost.kind == CostSpec::Kind::StressTracking && solver.formulation != Formulation::M)
    throw std::invalid_argument("stress tracking needs the four-field formulation");
  Evaluation ev;
  StateSolve s;
  try {
    s = solve_state(shape, solver);
  } catch (const NoConvergence& e) {
    ev.failure = e.what();
    return ev;
  } catch (const SingularSaddle& e) {
    ev.failure = e.what();
    return ev;
  } catch (const DegenerateCell& e) {
    ev.failure = e.what();
    return ev;
  }
  ev.state = std::move(s.state);
  ev.multipliers = std::move(s.multipliers);
  ev.history = std::move(s.history);
  if (!s.converged) {
    ev.failure = "fixed point did not converge";
    return ev;
  }
  const auto& problem = *s.problem;
  double J = 0.0;
  switch (cost.kind) {
    case CostSpec::Kind::Dissipation:
      J = ev.state.u.dot(problem.system().A * ev.state.u);
      break;
    case CostSpec::Kind::StressTracking:
      J = weighted_misfit(problem, ev.multipliers->sigma_tau, cost.target);
      break;
    case CostSpec::Kind::TraceTracking:
      J = weighted_misfit(problem, ev.state.u_tau, cost.target);
      break;
  }
  ev.J = cost.weight * J;
  ev.feasible = true;
  return ev;
}

namespace {

OptEval evaluate_controls(int id, const std::vector<double>& controls, const CostSpec& cost,
                          const AdmissibleSetParams& params, const SolverConfig& solver) {
  OptEval e;
  e.id = id;
  e.controls = controls;
  std::optional<BoundaryShape> shape;
  try {
    shape.emplace(shape_from_controls(controls, params));
  } catch (const ConstraintViolation&) {
    return e;
  }
  auto ev = evaluate_cost(*shape, cost, solver);
  e.feasible = ev.feasible;
  e.J = ev.J;
  e.history = std::move(ev.history);
  return e;
}

OptEval pending(int id, std::vector<double> controls) {
  OptEval e;
  e.id = id;
  e.controls = std::move(controls);
  return e;
}

void evaluate_batch(std::vector<OptEval>& batch, const CostSpec& cost, const AdmissibleSetParams& params,
                    const SolverConfig& solver, int threads) {
  const int n = static_cast<int>(batch.size());
  const int workers = std::clamp(threads, 1, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        batch[i] = evaluate_controls(batch[i].id, batch[i].controls, cost, params, solver);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

OptRun optimize(const CostSpec& cost, const AdmissibleSetParams& params, const SolverConfig& solver,
                const OptimizeOptions& opts) {
  if (opts.initial.size() < 4) throw std::invalid_argument("optimize needs at least 4 initial controls");
  if (!(opts.step0 > 0.0) || !(opts.shrink > 0.0 && opts.shrink < 1.0) || opts.budget < 0 || !(opts.min_step > 0.0))
    throw std::invalid_argument("invalid optimizer options");

  OptRun run;
  std::vector<OptEval> start{pending(0, opts.initial)};
  evaluate_batch(start, cost, params, solver, 1);
  if (!start[0].feasible) throw InfeasibleStart("initial controls are not admissible or the state solve failed");
  std::vector<double> current = opts.initial;
  double current_J = start[0].J;
  run.evaluations.push_back(std::move(start[0]));
  run.best_so_far.push_back(current_J);

  const int m = static_cast<int>(current.size());
  double step = opts.step0;
  int used = 0;
  while (step >= opts.min_step && used < opts.budget) {
    run.step_trace.push_back(step);
    std::vector<OptEval> batch;
    for (int i = 0; i < m && used + static_cast<int>(batch.size()) < opts.budget; ++i) {
      for (double sign : {1.0, -1.0}) {
        if (used + static_cast<int>(batch.size()) >= opts.budget) break;
        auto probe = current;
        probe[i] = std::clamp(probe[i] + sign * step, params.alpha_min, params.alpha_max);
        if (probe[i] == current[i]) continue;
        batch.push_back(pending(static_cast<int>(run.evaluations.size() + batch.size()), std::move(probe)));
      }
    }
    evaluate_batch(batch, cost, params, solver, opts.threads);
    used += static_cast<int>(batch.size());

    int best = -1;
    for (int k = 0; k < static_cast<int>(batch.size()); ++k)
      if (batch[k].feasible && batch[k].J < (best < 0 ? current_J : batch[best].J)) best = k;
    if (best >= 0) {
      current = batch[best].controls;
      current_J = batch[best].J;
    } else {
      step *= opts.shrink;
    }
    for (auto& e : batch) {
      run.best_so_far.push_back(std::min(run.best_so_far.back(), e.feasible ? e.J : run.best_so_far.back()));
      run.evaluations.push_back(std::move(e));
    }
  }
  run.best_controls = current;
  run.best_J = current_J;
  run.stop_reason = used >= opts.budget ? "budget" : "step";
  return run;
}

BodyForce pairing_field(int index) {
  constexpr double pi = std::numbers::pi;
  switch (index) {
    case 0:
      return [](const Vec2&) { return Vec2(1.0, 0.0); };
    case 1:
      return [](const Vec2&) { return Vec2(0.0, 1.0); };
    case 2:
      return [](const Vec2& x) { return Vec2(std::sin(pi * x.x()), 0.0); };
    case 3:
      return [](const Vec2& x) { return Vec2(x.y() - 1.0, x.x()); };
    case 4:
      return [](const Vec2& x) { return Vec2(std::cos(2.0 * pi * x.x()), x.y() * std::sin(pi * x.x())); };
    default:
      throw std::out_of_range("pairing field index");
  }
}

std::vector<StabilityRow> stability_experiment(const ShapeCandidate& base, const ShapeCandidate& direction,
                                               std::span<const double> deltas, const AdmissibleSetParams& params,
                                               const SolverConfig& solver) {
  // Validate every perturbed shape before the first solve.
  std::vector<BoundaryShape> shapes;
  for (double d : deltas) shapes.push_back(validate_shape(base.plus(direction, d), params));
  const auto shape0 = validate_shape(base, params);

  auto solve = [&](const BoundaryShape& shape) {
    auto s = solve_state(shape, solver);
    if (!s.converged) throw NoConvergence("stability experiment fixed point", static_cast<int>(s.history.size()), 0.0);
    return s;
  };
  auto pairings = [&](const StateSolve& s, bool normal) {
    std::array<double, kPairingFields> out{};
    const auto& space = s.problem->space();
    const auto& system = s.problem->system();
    for (int k = 0; k < kPairingFields; ++k) {
      if (normal)
        out[k] = s.multipliers ? normal_pairing(space, system, s.multipliers->sigma_nu, pairing_field(k))
                               : std::numeric_limits<double>::quiet_NaN();
      else
        out[k] = tangential_pairing(space, system,
                                    s.multipliers ? s.multipliers->sigma_tau : s.state.sigma_tau, pairing_field(k));
    }
    return out;
  };

  const auto ref = solve(shape0);
  const auto& sys0 = ref.problem->system();
  const double norm0 = h1_norm(sys0, ref.state.u);
  const auto nu0 = pairings(ref, true);
  const auto tau0 = pairings(ref, false);

  std::vector<StabilityRow> rows;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    StabilityRow row;
    row.delta = deltas[i];
    if (deltas[i] != 0.0) {
      const auto s = solve(shapes[i]);
      const Vector du = s.state.u - ref.state.u;
      row.e_u = h1_norm(sys0, du);
      row.e_p = pressure_l2(sys0, s.state.p - ref.state.p);
      row.relative_e_u = norm0 > 0.0 ? row.e_u / norm0 : 0.0;
      const auto nu = pairings(s, true);
      const auto tau = pairings(s, false);
      for (int k = 0; k < kPairingFields; ++k) {
        row.nu_diff[k] = std::abs(nu[k] - nu0[k]);
        row.tau_diff[k] = std::abs(tau[k] - tau0[k]);
      }
    } else if (!ref.multipliers) {
      row.nu_diff.fill(std::numeric_limits<double>::quiet_NaN());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace slipflow
