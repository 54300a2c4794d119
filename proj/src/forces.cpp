#include "slipflow/forces.hpp"

namespace slipflow {

BodyForce constant_force(const Vec2& value) {
  return [value](const Vec2&) { return value; };
}

BodyForce shear_force(double amplitude) {
  return [amplitude](const Vec2& x) { return Vec2(amplitude * x.y(), 0.0); };
}

BodyForce vortex_force(double amplitude, const Vec2& center) {
  return [amplitude, center](const Vec2& x) {
    return Vec2(-amplitude * (x.y() - center.y()), amplitude * (x.x() - center.x()));
  };
}

}  // namespace slipflow
