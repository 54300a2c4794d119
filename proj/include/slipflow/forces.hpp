#pragma once

#include "slipflow/fem.hpp"

namespace slipflow {

// A constant force is a gradient, so in the closed channel it is balanced by
// pressure alone and drives no flow. The shear and vortex fields have
// nonzero curl.

BodyForce constant_force(const Vec2& value);

/// f = (amplitude * x2, 0).
BodyForce shear_force(double amplitude);

/// f = amplitude * (-(x2 - center_y), x1 - center_x).
BodyForce vortex_force(double amplitude, const Vec2& center = Vec2(0.5, 1.0));

}  // namespace slipflow
