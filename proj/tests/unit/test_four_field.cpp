#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/four_field.hpp"

using namespace slipflow;

namespace {
const ShapeCandidate kFlat = ShapeCandidate::constant(0.5);
const ShapeCandidate kSine = ShapeCandidate::sine(0.5, 0.05, 1.0);
}  // namespace

TEST_CASE("four-field solve needs a weak-mode problem") {
  const auto p = corpus::problem(kFlat, 4, shear_force(1.0));
  CHECK_THROWS_AS(solve_four_field_aux(*p, SlipBound::constant(1.0), corpus::zeros(*p)), std::invalid_argument);
}

TEST_CASE("four-field zero data") {
  const auto p = corpus::problem(kSine, 4, constant_force(Vec2(0, 0)), ImpermeabilityMode::Weak);
  const auto s = solve_four_field_aux(*p, SlipBound::constant(1.0), corpus::zeros(*p));
  CHECK(s.flow.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.flow.p.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.multipliers.sigma_nu.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.multipliers.sigma_tau.lpNorm<Eigen::Infinity>() == 0.0);

  const auto q = corpus::problem(kSine, 4, constant_force(Vec2(0, 0)));
  const auto sp = solve_aux(*q, SlipBound::constant(1.0), corpus::zeros(*q));
  const auto rep = check_equivalence(q->system(), sp, s.flow, s.multipliers);
  CHECK(rep.velocity_h1 == 0.0);
  CHECK(rep.pressure_l2 == 0.0);
  CHECK(rep.sigma_tau_max == 0.0);
}

TEST_CASE("identical inputs compare equal and layouts are checked") {
  const auto p = corpus::problem(kSine, 4, shear_force(40.0), ImpermeabilityMode::Weak);
  const auto s = solve_four_field_aux(*p, SlipBound::constant(1.0), corpus::zeros(*p));
  const auto rep = check_equivalence(p->system(), s.flow, s.flow, s.multipliers);
  CHECK(rep.velocity_h1 == 0.0);
  CHECK(rep.pressure_l2 == 0.0);
  CHECK(rep.sigma_tau_max == 0.0);

  const auto other = corpus::problem(kSine, 6, shear_force(40.0));
  const auto so = solve_aux(*other, SlipBound::constant(1.0), corpus::zeros(*other));
  CHECK_THROWS_AS(check_equivalence(p->system(), so, s.flow, s.multipliers), SpaceMismatch);
}

TEST_CASE("weak impermeability holds and the multipliers respect the bound") {
  const auto p = corpus::problem(kSine, 8, vortex_force(20.0), ImpermeabilityMode::Weak);
  const auto g = SlipBound::linear_saturating(1.0, 1.0, 1.0);
  const auto r = solve_four_field(*p, g, corpus::zeros(*p));
  REQUIRE(r.converged);
  CHECK((p->system().N * r.flow.u).lpNorm<Eigen::Infinity>() <= 1e-10);
  const auto& m = r.multipliers;
  CHECK(((m.sigma_tau.cwiseAbs() - m.bound).maxCoeff()) <= 0.0);
  const Vector own = slip_bounds(*p, g, r.flow.u_tau.cwiseAbs());
  CHECK(m.bound == own);
}

TEST_CASE("constant bound: fixed point equals one auxiliary solve") {
  const auto p = corpus::problem(kSine, 8, shear_force(40.0), ImpermeabilityMode::Weak);
  const auto g = SlipBound::constant(1.0);
  const auto a = solve_four_field_aux(*p, g, Vector::Constant(p->space().slip_count(), 0.7));
  const auto b = solve_four_field(*p, g, corpus::zeros(*p));
  CHECK((a.flow.u - b.flow.u).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((a.multipliers.sigma_nu - b.multipliers.sigma_nu).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("velocity-pressure and four-field fixed points coincide") {
  for (const auto& shape : corpus::shapes()) {
    const auto g = SlipBound::linear_saturating(1.0, 0.05, 1.0);
    const auto pp = corpus::problem(shape.candidate, 8, shear_force(40.0));
    const auto pm = corpus::problem(shape.candidate, 8, shear_force(40.0), ImpermeabilityMode::Weak);
    const auto a = fixed_point(*pp, g, corpus::zeros(*pp));
    const auto b = solve_four_field(*pm, g, corpus::zeros(*pm));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    const auto rep = check_equivalence(pp->system(), a.state, b.flow, b.multipliers);
    INFO(shape.name);
    CHECK(rep.velocity_h1 <= 1e-6);
    CHECK(rep.pressure_l2 <= 1e-6);
    CHECK(rep.sigma_tau_max <= 1e-6);
  }
}

TEST_CASE("normal multiplier under a vertical load is minus the pressure") {
  // f = (0, -1) is a gradient: u = 0 and p = -x2 + const, so the normal
  // stress -p + (du/dnu).nu reduces to -p on the bottom.
  const auto p = corpus::problem(kFlat, 8, constant_force(Vec2(0, -1)), ImpermeabilityMode::Weak);
  const auto s = solve_four_field_aux(*p, SlipBound::constant(1.0), corpus::zeros(*p));
  const Vector rec = recover_normal_stress(p->space(), s.flow);
  for (int j : p->space().active_slip) CHECK(std::abs(s.multipliers.sigma_nu[j] - rec[j]) <= 1e-10);
}

TEST_CASE("normal multiplier approaches the recovered normal stress under refinement") {
  double prev = 1e300;
  for (int n : {8, 16, 32}) {
    const auto p = corpus::problem(kFlat, n, shear_force(40.0), ImpermeabilityMode::Weak);
    const auto s = solve_four_field_aux(*p, SlipBound::constant(1e6), corpus::zeros(*p));
    const Vector rec = recover_normal_stress(p->space(), s.flow);
    double diff = 0.0, scale = 0.0;
    for (int j : p->space().active_slip) {
      diff = std::max(diff, std::abs(s.multipliers.sigma_nu[j] - rec[j]));
      scale = std::max(scale, std::abs(rec[j]));
    }
    INFO("n = ", n, " diff = ", diff, " scale = ", scale);
    CHECK(diff < prev);
    prev = diff;
  }
}

TEST_CASE("boundary pairings are linear in the multiplier") {
  const auto p = corpus::problem(kSine, 8, shear_force(40.0), ImpermeabilityMode::Weak);
  const auto s = solve_four_field_aux(*p, SlipBound::constant(1.0), corpus::zeros(*p));
  const BodyForce v = [](const Vec2& x) { return Vec2(x.y(), std::sin(x.x())); };
  const double a = tangential_pairing(p->space(), p->system(), s.multipliers.sigma_tau, v);
  const double b = tangential_pairing(p->space(), p->system(), 2.0 * s.multipliers.sigma_tau, v);
  CHECK(b == doctest::Approx(2.0 * a));
  const Vector ones = Vector::Ones(p->space().slip_count());
  const BodyForce tangent_one = [](const Vec2&) { return Vec2(1.0, 0.0); };
  // On a flat boundary <1, (1,0).tau> is the boundary length less the two
  // corner weights h/6, which belong to the no-slip part.
  const auto flat = corpus::problem(kFlat, 8, shear_force(1.0), ImpermeabilityMode::Weak);
  CHECK(tangential_pairing(flat->space(), flat->system(), ones, tangent_one) == doctest::Approx(1.0 - 2.0 / 48.0));
  CHECK(std::abs(normal_pairing(flat->space(), flat->system(), ones, tangent_one)) <= 1e-15);
}
