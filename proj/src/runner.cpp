#include "slipflow/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "slipflow/errors.hpp"
#include "slipflow/io.hpp"
#include "slipflow/manufactured.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

namespace {

constexpr int kResidualSamples = 50;

using Cells = std::vector<CsvWriter::Cell>;

struct Summary {
  std::vector<std::string> keys;
  Cells values;
  void add(const std::string& key, CsvWriter::Cell value) {
    keys.push_back(key);
    values.push_back(std::move(value));
  }
};

void write_summary(const std::filesystem::path& dir, const RunConfig& config, const std::string& status,
                   const std::string& message, const Summary& extra) {
  std::vector<std::string> header{"task", "status", "message"};
  Cells row{std::string(to_string(config.task)), status, message};
  header.insert(header.end(), extra.keys.begin(), extra.keys.end());
  row.insert(row.end(), extra.values.begin(), extra.values.end());
  CsvWriter csv(dir / "summary.csv", header);
  csv.row(row);
}

long long ll(int v) { return v; }

struct Context {
  RunConfig config;
  std::filesystem::path dir;
  int threads = 1;
  Summary summary;
};

BoundaryShape run_shape(const RunConfig& c) { return validate_shape(shape_candidate(c), admissible_params(c)); }

std::shared_ptr<SlipProblem> make_problem(const RunConfig& c, bool weak) {
  const auto shape = run_shape(c);
  auto space = build_space(build_mesh(shape, c.n_x, c.n_y), shape);
  auto system = assemble(space, body_force(c));
  return std::make_shared<SlipProblem>(std::move(space), std::move(system),
                                       weak ? ImpermeabilityMode::Weak : ImpermeabilityMode::Strong);
}

void write_boundary(const std::filesystem::path& dir, const SlipProblem& problem, const FlowState& state,
                    const Vector& bound, bool four_field) {
  const auto& space = problem.space();
  if (four_field) {
    CsvWriter csv(dir / "boundary_stress.csv", {"x1", "sigma_nu", "sigma_tau", "u_tau", "g"});
    for (int j = 0; j < space.slip_count(); ++j)
      csv.row({space.slip_nodes[j].x1, state.sigma_nu[j], state.sigma_tau[j], state.u_tau[j], bound[j]});
  } else {
    CsvWriter csv(dir / "boundary.csv", {"x1", "u_tau", "sigma_tau", "g"});
    for (int j = 0; j < space.slip_count(); ++j)
      csv.row({space.slip_nodes[j].x1, state.u_tau[j], state.sigma_tau[j], bound[j]});
  }
}

void summarize_state(Context& ctx, const SlipProblem& problem, const FlowState& state, const SlipBound& g,
                     const Vector& phi) {
  const auto res = vi_residual(problem, state, g, phi);
  auto& s = ctx.summary;
  s.add("energy", energy(problem, state, g, phi));
  s.add("h1_seminorm", h1_seminorm(problem.system(), state.u));
  s.add("pressure_l2", pressure_l2(problem.system(), state.p));
  s.add("max_abs_u_tau", state.u_tau.size() ? state.u_tau.cwiseAbs().maxCoeff() : 0.0);
  s.add("c_hat", problem.trace_constant());
  s.add("bound_violation", res.bound_violation);
  s.add("complementarity_gap", res.complementarity_gap);
  s.add("saturation_defect", res.saturation_defect);
  s.add("saddle_residual", saddle_residual(problem, state, kResidualSamples, ctx.config.seed));
}

int task_solve(Context& ctx, bool four_field) {
  const auto& c = ctx.config;
  const auto problem = make_problem(c, four_field);
  const auto g = slip_bound(c);
  const Vector phi = Vector::Constant(problem->space().slip_count(), c.phi0);
  const auto opts = fixed_point_options(c).inner;
  const FlowState state = solve_aux(*problem, g, phi, opts);
  write_solution_vtk(ctx.dir / "solution.vtk", problem->space(), state.u, state.p);
  write_boundary(ctx.dir, *problem, state, slip_bounds(*problem, g, phi), four_field);
  ctx.summary.add("uzawa_iterations", ll(state.iterations));
  summarize_state(ctx, *problem, state, g, phi);
  return kExitOk;
}

int task_fixed_point(Context& ctx, bool four_field) {
  const auto& c = ctx.config;
  const auto problem = make_problem(c, four_field);
  const auto g = slip_bound(c);
  const Vector phi0 = Vector::Constant(problem->space().slip_count(), c.phi0);
  const auto opts = fixed_point_options(c);

  FlowState state;
  std::vector<HistoryRow> history;
  bool converged = false;
  Vector bound;
  if (four_field) {
    auto r = solve_four_field(*problem, g, phi0, opts);
    state = std::move(r.flow);
    state.sigma_tau = r.multipliers.sigma_tau;
    bound = r.multipliers.bound;
    history = std::move(r.history);
    converged = r.converged;
  } else {
    auto r = fixed_point(*problem, g, phi0, opts);
    state = std::move(r.state);
    history = std::move(r.history);
    converged = r.converged;
    bound = slip_bounds(*problem, g, state.u_tau.cwiseAbs());
  }
  {
    CsvWriter csv(ctx.dir / "history.csv", {"k", "fp_diff", "uzawa_iters", "energy"});
    for (const auto& h : history) csv.row({ll(h.k), h.fp_diff, ll(h.uzawa_iters), h.energy});
  }
  write_solution_vtk(ctx.dir / "solution.vtk", problem->space(), state.u, state.p);
  write_boundary(ctx.dir, *problem, state, bound, four_field);
  ctx.summary.add("fp_iterations", ll(static_cast<int>(history.size())));
  ctx.summary.add("contraction_bound", problem->trace_constant() * problem->trace_constant() * g.lipschitz());
  summarize_state(ctx, *problem, state, g, state.u_tau.cwiseAbs());
  if (!converged)
    throw NoConvergence("fixed point", static_cast<int>(history.size()), history.empty() ? 0.0 : history.back().fp_diff);
  return kExitOk;
}

int task_optimize(Context& ctx) {
  const auto& c = ctx.config;
  OptimizeOptions opts;
  opts.initial = c.controls.empty() ? std::vector<double>(5, c.alpha) : c.controls;
  opts.step0 = c.step0;
  opts.shrink = c.shrink;
  opts.budget = c.budget;
  opts.min_step = c.min_step;
  opts.threads = ctx.threads;
  const auto params = admissible_params(c);
  const auto run = optimize(cost_spec(c), params, solver_config(c), opts);

  std::vector<std::string> header{"eval_id"};
  for (std::size_t i = 0; i < opts.initial.size(); ++i) header.push_back("c" + std::to_string(i));
  header.insert(header.end(), {"feasible", "J", "best_so_far"});
  CsvWriter csv(ctx.dir / "optrun.csv", header);
  for (std::size_t k = 0; k < run.evaluations.size(); ++k) {
    const auto& e = run.evaluations[k];
    Cells row{ll(e.id)};
    for (double v : e.controls) row.push_back(v);
    row.push_back(ll(e.feasible ? 1 : 0));
    row.push_back(e.J);
    row.push_back(run.best_so_far[k]);
    csv.row(row);
  }
  ShapeFile best;
  best.omega = c.omega;
  best.alpha = run.best_controls;
  for (std::size_t i = 0; i < best.alpha.size(); ++i)
    best.x.push_back(static_cast<double>(i) / static_cast<double>(best.alpha.size() - 1));
  write_shape_file(ctx.dir / "best_shape.txt", best);

  auto& s = ctx.summary;
  s.add("initial_J", run.evaluations.front().J);
  s.add("best_J", run.best_J);
  s.add("evaluations", ll(static_cast<int>(run.evaluations.size())));
  s.add("polls", ll(static_cast<int>(run.step_trace.size())));
  s.add("final_step", run.step_trace.empty() ? c.step0 : run.step_trace.back());
  s.add("stop_reason", run.stop_reason);
  return kExitOk;
}

int task_stability(Context& ctx) {
  const auto& c = ctx.config;
  const ShapeCandidate direction = c.direction == "spline"
                                       ? ShapeCandidate::spline(c.direction_controls)
                                       : ShapeCandidate::sine(0.0, c.direction_amplitude, c.direction_frequency);
  const auto solver = solver_config(c);
  const auto rows = stability_experiment(shape_candidate(c), direction, c.deltas, admissible_params(c), solver);
  const bool four_field = solver.formulation == Formulation::M;
  std::vector<std::string> header{"delta", "e_u", "e_p", "relative_e_u"};
  for (int k = 0; k < kPairingFields; ++k) {
    if (four_field) header.push_back("nu_diff_" + std::to_string(k));
    header.push_back("tau_diff_" + std::to_string(k));
  }
  CsvWriter csv(ctx.dir / "stability.csv", header);
  for (const auto& r : rows) {
    Cells row{r.delta, r.e_u, r.e_p, r.relative_e_u};
    for (int k = 0; k < kPairingFields; ++k) {
      if (four_field) row.push_back(r.nu_diff[k]);
      row.push_back(r.tau_diff[k]);
    }
    csv.row(row);
  }
  ctx.summary.add("rows", ll(static_cast<int>(rows.size())));
  ctx.summary.add("final_relative_e_u", rows.back().relative_e_u);
  return kExitOk;
}

int task_convergence(Context& ctx) {
  const auto& c = ctx.config;
  const auto rows = convergence_study(c.levels, c.alpha, c.omega);
  CsvWriter csv(ctx.dir / "convergence.csv", {"n", "h1_error", "l2_error", "h1_rate", "l2_rate"});
  double h1_rate = 0.0, l2_rate = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row({ll(r.n), r.h1_error, r.l2_error, r.h1_rate, r.l2_rate});
    if (i == 1 || (i > 1 && r.h1_rate < h1_rate)) h1_rate = r.h1_rate;
    if (i == 1 || (i > 1 && r.l2_rate < l2_rate)) l2_rate = r.l2_rate;
  }
  ctx.summary.add("min_h1_rate", h1_rate);
  ctx.summary.add("min_l2_rate", l2_rate);
  return kExitOk;
}

int dispatch(Context& ctx) {
  switch (ctx.config.task) {
    case Task::SolveP:
      return task_solve(ctx, false);
    case Task::SolveM:
      return task_solve(ctx, true);
    case Task::FixedPointP:
      return task_fixed_point(ctx, false);
    case Task::FixedPointM:
      return task_fixed_point(ctx, true);
    case Task::Optimize:
      return task_optimize(ctx);
    case Task::Stability:
      return task_stability(ctx);
    case Task::ConvergenceStudy:
      return task_convergence(ctx);
  }
  return kExitError;
}

void report(const std::string& status, const std::string& message) {
  std::cerr << "slipflow: " << status << ": " << message << '\n';
}

}  // namespace

int run(RunConfig config, const RunOptions& options) {
  if (options.out_dir) config.output_dir = options.out_dir->string();
  if (options.seed) config.seed = *options.seed;
  Context ctx{config, config.output_dir, std::max(options.threads, 1), {}};
  try {
    config.validate();
    std::filesystem::create_directories(ctx.dir);
    std::ofstream echo(ctx.dir / "config.echo", std::ios::binary);
    echo << to_text(config);
    if (!echo) throw IoError("cannot write config.echo");
  } catch (const std::exception& e) {
    report("config_error", e.what());
    try {
      std::filesystem::create_directories(ctx.dir);
      write_summary(ctx.dir, config, "config_error", e.what(), {});
    } catch (const std::exception&) {
    }
    return kExitError;
  }

  std::string status = "ok", message;
  int code = kExitOk;
  try {
    code = dispatch(ctx);
  } catch (const NoConvergence& e) {
    status = "no_convergence";
    message = e.what();
    code = kExitNoConvergence;
  } catch (const ConfigError& e) {
    status = "config_error";
    message = e.what();
    code = kExitError;
  } catch (const ConstraintViolation& e) {
    status = "config_error";
    message = e.what();
    code = kExitError;
  } catch (const IoError& e) {
    status = "io_error";
    message = e.what();
    code = kExitError;
  } catch (const std::exception& e) {
    status = "error";
    message = e.what();
    code = kExitError;
  }
  try {
    // Failed tasks keep the columns they produced before the failure.
    write_summary(ctx.dir, config, status, message, ctx.summary);
  } catch (const std::exception& e) {
    report("io_error", e.what());
    return kExitError;
  }
  if (code != kExitOk) report(status, message);
  return code;
}

int run_file(const std::filesystem::path& config_path, const RunOptions& options) {
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const std::exception& e) {
    report("config_error", e.what());
    if (options.out_dir) {
      try {
        std::filesystem::create_directories(*options.out_dir);
        CsvWriter csv(*options.out_dir / "summary.csv", {"task", "status", "message"});
        csv.row({std::string(), std::string("config_error"), std::string(e.what())});
      } catch (const std::exception&) {
      }
    }
    return kExitError;
  }
  return run(std::move(config), options);
}

int threads_from_environment() {
  const char* env = std::getenv("SLIPFLOW_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  return (end != env && *end == '\0' && n > 0) ? static_cast<int>(std::min(n, 256L)) : 1;
}

}  // namespace slipflow
