#include <doctest.h>

#include "slipflow/slip_bound.hpp"

using slipflow::SlipBound;

TEST_CASE("slip bound families") {
  const auto c = SlipBound::constant(2.0);
  CHECK(c(0.0) == 2.0);
  CHECK(c(7.0) == 2.0);
  CHECK(c.lipschitz() == 0.0);

  const auto s = SlipBound::linear_saturating(1.0, 0.05, 1.0);
  CHECK(s(0.0) == 1.0);
  CHECK(s(0.5) == doctest::Approx(1.025));
  CHECK(s(3.0) == doctest::Approx(1.05));
  CHECK(s.g_max() == doctest::Approx(1.05));
  s.validate();

  const auto w = SlipBound::weakening(1.0, 2.0, 0.5);
  CHECK(w(0.0) == doctest::Approx(2.0));
  CHECK(w(1.0) == doctest::Approx(1.0));
  w.validate();

  const Eigen::VectorXd phi = Eigen::VectorXd::LinSpaced(5, 0.0, 2.0);
  const auto g = s.apply(phi);
  for (int i = 0; i < phi.size(); ++i) CHECK(g[i] == s(phi[i]));
}

TEST_CASE("slip bound validation") {
  CHECK_THROWS_AS(SlipBound::constant(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(SlipBound::linear_saturating(1.0, -1.0, 1.0).validate(), std::invalid_argument);
  // Declared Lipschitz constant smaller than the actual one.
  CHECK_THROWS_AS(SlipBound::custom([](double t) { return 1.0 + std::min(t, 1.0); }, 1.0, 2.0, 0.5).validate(),
                  std::invalid_argument);
  // Declared range too narrow.
  CHECK_THROWS_AS(SlipBound::custom([](double t) { return 1.0 + std::min(t, 1.0); }, 1.0, 1.5, 1.0).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(SlipBound::custom([](double t) { return 1.0 + std::min(t, 1.0); }, 1.0, 2.0, 1.0).validate());
}
