#pragma once

// Shared test corpus: three shapes, two forces with nonzero curl, two slip
// bounds. Amplitudes are chosen so that every case has both sticking and
// slipping nodes.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "slipflow/forces.hpp"
#include "slipflow/slip_solver.hpp"

namespace corpus {

using namespace slipflow;

inline AdmissibleSetParams params() { return {}; }

struct ShapeCase {
  std::string name;
  ShapeCandidate candidate;
};

inline std::vector<ShapeCase> shapes() {
  const std::vector<double> bump{0.45, 0.5, 0.55, 0.5, 0.45};
  return {{"flat", ShapeCandidate::constant(0.5)},
          {"sine", ShapeCandidate::sine(0.5, 0.05, 1.0)},
          {"spline", ShapeCandidate::spline(bump)}};
}

struct ForceCase {
  std::string name;
  BodyForce force;
};

inline std::vector<ForceCase> forces() { return {{"shear", shear_force(40.0)}, {"vortex", vortex_force(20.0)}}; }

struct BoundCase {
  std::string name;
  SlipBound bound;
};

inline std::vector<BoundCase> bounds() {
  return {{"constant", SlipBound::constant(1.0)}, {"saturating", SlipBound::linear_saturating(1.0, 0.05, 1.0)}};
}

// Two by two cases for the brute-force oracle: (shape, force, g, phi).
struct OracleCase {
  std::string name;
  ShapeCandidate shape;
  BodyForce force;
  SlipBound g;
  double phi_scale;  // phi_j = phi_scale (1 + sin 3j)
};

inline std::vector<OracleCase> oracle_cases() {
  const std::vector<double> bump{0.45, 0.5, 0.55, 0.5, 0.45};
  return {
      {"flat, shear, g = 1", ShapeCandidate::constant(0.5), shear_force(60.0), SlipBound::constant(1.0), 0.0},
      {"flat, shear, g = 3", ShapeCandidate::constant(0.5), shear_force(60.0), SlipBound::constant(3.0), 0.0},
      {"sine, shear, saturating", ShapeCandidate::sine(0.5, 0.05, 1.0), shear_force(60.0),
       SlipBound::linear_saturating(1.5, 1.0, 1.0), 0.4},
      {"sine, vortex, weakening", ShapeCandidate::sine(0.5, 0.05, 1.0), vortex_force(30.0),
       SlipBound::weakening(0.3, 1.0, 0.5), 0.2},
      {"spline, shear, g = 2", ShapeCandidate::spline(bump), shear_force(60.0),
       SlipBound::constant(2.0), 0.0},
  };
}

inline Vector oracle_phi(const SlipProblem& p, double scale) {
  Vector phi(p.space().slip_count());
  for (int j = 0; j < phi.size(); ++j) phi[j] = scale * (1.0 + std::sin(3.0 * j));
  return phi;
}

inline BoundaryShape validated(const ShapeCandidate& c) { return validate_shape(c, params()); }

inline std::shared_ptr<SlipProblem> problem(const ShapeCandidate& c, int n, const BodyForce& f,
                                            ImpermeabilityMode mode = ImpermeabilityMode::Strong) {
  const auto shape = validated(c);
  auto space = build_space(build_mesh(shape, n, n), shape);
  auto system = assemble(space, f);
  return std::make_shared<SlipProblem>(std::move(space), std::move(system), mode);
}

inline Vector zeros(const SlipProblem& p) { return Vector::Zero(p.space().slip_count()); }

}  // namespace corpus
