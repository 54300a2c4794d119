#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/shape_opt.hpp"

using namespace slipflow;

namespace {

SolverConfig solver(int n = 8) {
  SolverConfig s;
  s.nx = s.ny = n;
  s.force = shear_force(40.0);
  s.bound = SlipBound::linear_saturating(1.0, 0.05, 1.0);
  return s;
}

BoundaryShape flat(double a) { return validate_shape(ShapeCandidate::constant(a), AdmissibleSetParams{}); }

TargetProfile profile_of(const SlipProblem& p, const Vector& values) {
  TargetProfile t;
  for (int j = 0; j < p.space().slip_count(); ++j) {
    t.x.push_back(p.space().slip_nodes[j].x1);
    t.y.push_back(values[j]);
  }
  return t;
}

}  // namespace

TEST_CASE("target profile interpolation") {
  TargetProfile t{{0.0, 0.5, 1.0}, {1.0, 3.0, 2.0}};
  CHECK(t(-1.0) == 1.0);
  CHECK(t(0.25) == doctest::Approx(2.0));
  CHECK(t(0.75) == doctest::Approx(2.5));
  CHECK(t(2.0) == 2.0);
  CHECK_THROWS_AS((TargetProfile{{0.0, 0.0}, {1.0, 1.0}}.validate()), std::invalid_argument);
  CostSpec c;
  c.weight = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CostSpec{CostSpec::Kind::TraceTracking, {}, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("shape from controls") {
  const AdmissibleSetParams params;
  const auto s = shape_from_controls(std::vector<double>(5, 0.5), params);
  for (int i = 0; i <= 100; ++i) CHECK(std::abs(s.alpha(i / 100.0) - 0.5) <= 1e-15);
  CHECK_THROWS_AS(shape_from_controls(std::vector<double>{0.5, 0.5, 0.95, 0.5, 0.5}, params), ConstraintViolation);
  CHECK_THROWS_AS(shape_from_controls(std::vector<double>{0.5, 0.5, 0.5}, params), std::invalid_argument);
}

TEST_CASE("zero force has zero dissipation") {
  auto s = solver();
  s.force = constant_force(Vec2(0, 0));
  const auto e = evaluate_cost(flat(0.5), CostSpec{}, s);
  CHECK(e.feasible);
  CHECK(e.J == 0.0);
}

TEST_CASE("a gradient force drives no flow in the closed channel") {
  auto s = solver(16);
  s.force = constant_force(Vec2(1, 0));
  CHECK(evaluate_cost(flat(0.5), CostSpec{}, s).J <= 1e-20);
  CHECK(evaluate_cost(flat(0.6), CostSpec{}, s).J <= 1e-20);
}

TEST_CASE("dissipation baselines for the shear force") {
  // Frozen from the first verified run (16 x 16, shear 40, g = 1 + 0.05 min(t, 1)).
  const auto s = solver(16);
  const auto a = evaluate_cost(flat(0.5), CostSpec{}, s);
  const auto b = evaluate_cost(flat(0.6), CostSpec{}, s);
  CHECK(a.J == doctest::Approx(0.65994372394254641).epsilon(1e-9));
  CHECK(b.J == doctest::Approx(0.47344399471770926).epsilon(1e-9));
  CHECK(evaluate_cost(flat(0.5), CostSpec{}, s).J == a.J);
}

TEST_CASE("stress tracking against its own multiplier") {
  auto s = solver();
  s.formulation = Formulation::M;
  const auto shape = validate_shape(ShapeCandidate::sine(0.5, 0.05, 1.0), AdmissibleSetParams{});
  const auto first = evaluate_cost(shape, CostSpec{}, s);
  REQUIRE(first.multipliers);
  const auto p = corpus::problem(ShapeCandidate::sine(0.5, 0.05, 1.0), 8, s.force, ImpermeabilityMode::Weak);
  CostSpec cost{CostSpec::Kind::StressTracking, profile_of(*p, first.multipliers->sigma_tau), 1.0};
  const auto second = evaluate_cost(shape, cost, s);
  CHECK(second.feasible);
  CHECK(second.J <= 1e-12);

  s.formulation = Formulation::P;
  CHECK_THROWS_AS(evaluate_cost(shape, cost, s), std::invalid_argument);
}

TEST_CASE("unconverged state solves are infeasible") {
  auto s = solver();
  s.fixed_point.max_it = 1;
  s.bound = SlipBound::linear_saturating(1.0, 1.0, 1.0);
  const auto e = evaluate_cost(flat(0.5), CostSpec{}, s);
  CHECK_FALSE(e.feasible);
  CHECK(std::isinf(e.J));
  CHECK_FALSE(e.failure.empty());
}

TEST_CASE("optimize with no budget returns the start") {
  OptimizeOptions o;
  o.initial = std::vector<double>(5, 0.5);
  o.budget = 0;
  const auto run = optimize(CostSpec{}, AdmissibleSetParams{}, solver(), o);
  CHECK(run.evaluations.size() == 1);
  CHECK(run.best_controls == o.initial);
  CHECK(run.best_J == run.evaluations[0].J);
  CHECK(run.stop_reason == "budget");
}

TEST_CASE("optimize rejects an infeasible start") {
  OptimizeOptions o;
  o.initial = {0.5, 0.5, 0.95, 0.5, 0.5};
  CHECK_THROWS_AS(optimize(CostSpec{}, AdmissibleSetParams{}, solver(), o), InfeasibleStart);
}

TEST_CASE("trace tracking started at its target accepts no probe") {
  const std::vector<double> star{0.5, 0.52, 0.55, 0.5, 0.48};
  const auto s = solver();
  const auto shape = shape_from_controls(star, AdmissibleSetParams{});
  const auto ref = evaluate_cost(shape, CostSpec{}, s);
  const auto p = corpus::problem(ShapeCandidate::spline(star), 8, s.force);
  const CostSpec cost{CostSpec::Kind::TraceTracking, profile_of(*p, ref.state.u_tau), 1.0};
  OptimizeOptions o;
  o.initial = star;
  o.budget = 1000;
  const auto run = optimize(cost, AdmissibleSetParams{}, s, o);
  CHECK(run.stop_reason == "step");
  CHECK(run.best_controls == star);
  CHECK(run.best_J <= 1e-12);
  for (std::size_t k = 1; k < run.step_trace.size(); ++k) CHECK(run.step_trace[k] == 0.5 * run.step_trace[k - 1]);
  CHECK(run.step_trace.back() < 2e-4);
}

TEST_CASE("optimize contract on a short run") {
  const AdmissibleSetParams params;
  OptimizeOptions o;
  o.initial = std::vector<double>(5, 0.5);
  o.budget = 24;
  o.step0 = 0.1;
  const auto run = optimize(CostSpec{}, params, solver(), o);
  REQUIRE(run.evaluations.size() == 25);
  for (std::size_t k = 1; k < run.best_so_far.size(); ++k) CHECK(run.best_so_far[k] <= run.best_so_far[k - 1]);
  CHECK(run.best_J <= run.evaluations[0].J);
  CHECK(run.best_J == run.best_so_far.back());
  for (const auto& e : run.evaluations) {
    for (double c : e.controls) CHECK((c >= params.alpha_min && c <= params.alpha_max));
    if (e.feasible) CHECK_NOTHROW(shape_from_controls(e.controls, params));
  }

  o.threads = 3;
  const auto again = optimize(CostSpec{}, params, solver(), o);
  REQUIRE(again.evaluations.size() == run.evaluations.size());
  for (std::size_t k = 0; k < run.evaluations.size(); ++k) {
    CHECK(again.evaluations[k].controls == run.evaluations[k].controls);
    CHECK(again.evaluations[k].J == run.evaluations[k].J);
  }
}

TEST_CASE("stability with a zero delta") {
  const std::vector<double> deltas{0.0};
  for (auto f : {Formulation::P, Formulation::M}) {
    auto s = solver();
    s.formulation = f;
    const auto rows = stability_experiment(ShapeCandidate::constant(0.5), ShapeCandidate::sine(0, 0.05, 1), deltas,
                                           AdmissibleSetParams{}, s);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].e_u == 0.0);
    CHECK(rows[0].e_p == 0.0);
    for (double d : rows[0].tau_diff) CHECK(d == 0.0);
    if (f == Formulation::M)
      for (double d : rows[0].nu_diff) CHECK(d == 0.0);
  }
}

TEST_CASE("stability errors shrink with the perturbation") {
  auto s = solver();
  s.formulation = Formulation::M;
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  const auto rows = stability_experiment(ShapeCandidate::constant(0.5), ShapeCandidate::sine(0, 0.05, 1), deltas,
                                         AdmissibleSetParams{}, s);
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].e_u < rows[k - 1].e_u);
    CHECK(rows[k].e_p < rows[k - 1].e_p);
  }
  CHECK(rows.back().e_u / rows.front().e_u <= 0.25);
  CHECK_THROWS_AS(stability_experiment(ShapeCandidate::constant(0.5), ShapeCandidate::sine(0, 0.05, 1),
                                       std::vector<double>{10.0}, AdmissibleSetParams{}, s),
                  ConstraintViolation);
  CHECK_THROWS_AS(pairing_field(kPairingFields), std::out_of_range);
}
